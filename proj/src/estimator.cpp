#include "hankelinv/estimator.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace hankelinv {

Matrix assemble_M(const AveragedStats& st, const MomentPoint& pt) {
    const int d = st.d();
    const double Nc = st.Nc;
    Vector mu(d), nu(d);
    for (int r = 0; r < d; ++r) {
        const bool in = st.layout.kind_of(r) == SignalKind::input;
        mu(r) = in ? pt.m1u : pt.m1y;
        nu(r) = in ? pt.m2u : pt.m2y;
    }
    Matrix M(d, d);
    for (int r = 0; r < d; ++r) {
        M(r, r) = st.G(r, r) - 2.0 * mu(r) * st.rowsum(r) +
                  Nc * (2.0 * mu(r) * mu(r) - nu(r));
        for (int s = r + 1; s < d; ++s) {
            const double v = st.G(r, s) - mu(r) * st.rowsum(s) - mu(s) * st.rowsum(r) +
                             Nc * mu(r) * mu(s);
            M(r, s) = v;
            M(s, r) = v;
        }
    }
    return M;
}

double SubspaceBasis::orthonormality_error() const {
    if (k() == 0) return 0.0;
    const Matrix gram = basis * basis.transpose();
    return (gram - Matrix::Identity(k(), k())).cwiseAbs().maxCoeff();
}

namespace {

Matrix symmetrized(const Matrix& M) {
    if (M.rows() != M.cols()) throw InvalidArgument("expected a square matrix");
    if (!M.allFinite()) throw NumericError("matrix has non-finite entries");
    return 0.5 * (M + M.transpose());
}

}  // namespace

Spectrum svd_spectrum(const Matrix& M) {
    const Matrix S = symmetrized(M);
    Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
    return {svd.singularValues(), svd.matrixV()};
}

Vector singular_values(const Matrix& M) {
    return Eigen::JacobiSVD<Matrix>(symmetrized(M)).singularValues();
}

int numerical_rank(const Matrix& M, double eps_rank) {
    if (!M.allFinite()) throw NumericError("numerical_rank: non-finite entries");
    return numerical_rank_of(M, eps_rank);
}

double GridAxis::value(int i) const {
    if (points == 1) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

void GridAxis::check(const std::string& name) const {
    if (points < 1) throw InvalidArgument("grid axis " + name + ": points must be >= 1");
    if (!std::isfinite(lo) || !std::isfinite(hi))
        throw InvalidArgument("grid axis " + name + ": bounds must be finite");
    if (points > 1 && !(lo < hi))
        throw InvalidArgument("grid axis " + name + ": need lo < hi");
}

std::string to_string(MomentMode mode) {
    return mode == MomentMode::identical ? "identical" : "distinct";
}

MomentMode moment_mode_from_string(const std::string& s) {
    if (s == "identical") return MomentMode::identical;
    if (s == "distinct") return MomentMode::distinct;
    throw InvalidArgument("unknown moment mode '" + s + "'");
}

MomentGrid MomentGrid::identical(GridAxis m1, GridAxis m2) {
    return {MomentMode::identical, {m1, m2}};
}

MomentGrid MomentGrid::distinct(GridAxis m1u, GridAxis m2u, GridAxis m1y, GridAxis m2y) {
    return {MomentMode::distinct, {m1u, m2u, m1y, m2y}};
}

std::size_t MomentGrid::size() const {
    std::size_t n = axes.empty() ? 0 : 1;
    for (const auto& a : axes) n *= static_cast<std::size_t>(std::max(a.points, 0));
    return n;
}

MomentPoint MomentGrid::point(std::size_t flat) const {
    std::vector<double> v(axes.size());
    for (std::size_t j = axes.size(); j-- > 0;) {
        const auto pts = static_cast<std::size_t>(axes[j].points);
        v[j] = axes[j].value(static_cast<int>(flat % pts));
        flat /= pts;
    }
    if (mode == MomentMode::identical) return MomentPoint::identical(v[0], v[1]);
    return {v[0], v[1], v[2], v[3]};
}

void MomentGrid::check() const {
    const std::size_t want = mode == MomentMode::identical ? 2 : 4;
    if (axes.size() != want)
        throw InvalidArgument("moment grid: expected " + std::to_string(want) + " axes");
    static const char* names[2][4] = {{"m1", "m2", "", ""}, {"m1u", "m2u", "m1y", "m2y"}};
    for (std::size_t j = 0; j < axes.size(); ++j)
        axes[j].check(names[mode == MomentMode::identical ? 0 : 1][j]);
}

std::string to_string(EpsMode mode) {
    return mode == EpsMode::absolute ? "absolute" : "relative";
}

EpsMode eps_mode_from_string(const std::string& s) {
    if (s == "absolute") return EpsMode::absolute;
    if (s == "relative") return EpsMode::relative;
    throw InvalidArgument("unknown eps_sigma mode '" + s + "'");
}

std::string to_string(Selection s) {
    return s == Selection::min_sigma ? "min-sigma" : "nullity-sigma";
}

Selection selection_from_string(const std::string& s) {
    if (s == "min-sigma") return Selection::min_sigma;
    if (s == "nullity-sigma") return Selection::nullity_sigma;
    throw InvalidArgument("unknown selection rule '" + s + "'");
}

Candidate evaluate_point(const AveragedStats& st, const MomentPoint& pt, int nullity) {
    const int d = st.d();
    if (nullity < 0 || nullity > d) throw InvalidArgument("evaluate_point: bad nullity");
    const Spectrum sp = svd_spectrum(assemble_M(st, pt));
    Candidate c;
    c.point = pt;
    c.singular_values = sp.values;
    c.sigma_min = sp.values(d - 1);
    c.nullspace.basis = sp.vectors.rightCols(nullity).transpose();
    return c;
}

GridSearchResult grid_search(const AveragedStats& st, const MomentGrid& grid,
                             const GridSearchOptions& opts) {
    grid.check();
    const int d = st.d();
    if (opts.nullity < 1 || opts.nullity > d - 1)
        throw InvalidArgument("grid_search: nullity must lie in [1, d-1]");
    if (!(opts.eps_sigma > 0.0)) throw InvalidArgument("grid_search: eps_sigma must be > 0");

    const std::size_t total = grid.size();
    GridSearchResult res;
    res.landscape.resize(total);
    std::vector<std::optional<Candidate>> admitted(total);

    parallel_for(total, opts.workers, [&](std::size_t i) {
        LandscapePoint& lp = res.landscape[i];
        lp.point = grid.point(i);
        const Matrix M = assemble_M(st, lp.point);
        const Vector s = singular_values(M);
        lp.sigma_min = s(d - 1);
        lp.sigma_nullity = s(d - opts.nullity);
        const double smax = s(0);
        int rank = 0;
        for (int j = 0; j < d; ++j)
            if (s(j) > opts.eps_rank * smax) ++rank;
        lp.numerical_rank = rank;
        const double thr =
            opts.eps_mode == EpsMode::absolute ? opts.eps_sigma : opts.eps_sigma * smax;
        int below = 0;
        for (int j = 0; j < d; ++j)
            if (s(j) < thr) ++below;
        lp.admitted = below == opts.nullity;
        if (lp.admitted) admitted[i] = evaluate_point(st, lp.point, opts.nullity);
    });

    for (std::size_t i = 0; i < total; ++i) {
        if (!admitted[i]) continue;
        const LandscapePoint& lp = res.landscape[i];
        const double key =
            opts.selection == Selection::min_sigma ? lp.sigma_min : lp.sigma_nullity;
        if (!res.best_index) {
            res.best_index = i;
        } else {
            const LandscapePoint& cur = res.landscape[*res.best_index];
            const double cur_key =
                opts.selection == Selection::min_sigma ? cur.sigma_min : cur.sigma_nullity;
            if (key < cur_key) res.best_index = i;
        }
        res.candidates.push_back(std::move(*admitted[i]));
    }
    if (res.best_index) {
        for (const auto& c : res.candidates) {
            if (c.point == res.landscape[*res.best_index].point) {
                res.best = c;
                break;
            }
        }
    }
    return res;
}

}  // namespace hankelinv
