#include "hankelinv/hankel.hpp"

#include <Eigen/SVD>

namespace hankelinv {

int HankelLayout::row_index(SignalKind kind, int channel, int lag) const {
    const int channels = kind == SignalKind::input ? m : p;
    if (lag < 0 || lag >= L || channel < 0 || channel >= channels)
        throw InvalidArgument("row_index: channel or lag out of range");
    const int base = kind == SignalKind::input ? 0 : m * L;
    return base + lag * channels + channel;
}

SignalKind HankelLayout::kind_of(int row) const {
    if (row < 0 || row >= rows()) throw InvalidArgument("kind_of: row out of range");
    return row < m * L ? SignalKind::input : SignalKind::output;
}

int row_index(SignalKind kind, int channel, int lag, int m, int p, int L) {
    return HankelLayout{m, p, L}.row_index(kind, channel, lag);
}

Matrix hankel(const Matrix& seq, int L) {
    const auto N = static_cast<int>(seq.rows());
    const auto c = static_cast<int>(seq.cols());
    if (L < 1 || N < L)
        throw InvalidArgument("hankel: need N >= L >= 1 (N=" + std::to_string(N) +
                              ", L=" + std::to_string(L) + ")");
    const int cols = N - L + 1;
    Matrix H(c * L, cols);
    for (int lag = 0; lag < L; ++lag)
        for (int ch = 0; ch < c; ++ch)
            H.row(lag * c + ch) = seq.col(ch).segment(lag, cols).transpose();
    return H;
}

StackedHankel stacked_hankel(const Experiment& e, int L) {
    if (e.u.rows() != e.y.rows())
        throw InvalidArgument("stacked_hankel: u and y lengths differ");
    const Matrix Hu = hankel(e.u, L);
    const Matrix Hy = hankel(e.y, L);
    StackedHankel out;
    out.layout = {static_cast<int>(e.u.cols()), static_cast<int>(e.y.cols()), L};
    out.matrix.resize(Hu.rows() + Hy.rows(), Hu.cols());
    out.matrix << Hu, Hy;
    return out;
}

int numerical_rank_of(const Matrix& M, double rel_tol) {
    if (M.size() == 0) return 0;
    const Vector s = Eigen::JacobiSVD<Matrix>(M).singularValues();
    const double cutoff = rel_tol * s(0);
    int r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cutoff) ++r;
    return r;
}

bool pe_order_check(const Matrix& U, int order, double tol) {
    if (order < 1 || U.rows() < order) return false;
    const Matrix H = hankel(U, order);
    return numerical_rank_of(H, tol) == U.cols() * order;
}

}  // namespace hankelinv
