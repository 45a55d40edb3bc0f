#include "hankelinv/lti_sim.hpp"

#include "hankelinv/hankel.hpp"

#include <cmath>
#include <sstream>

namespace hankelinv {

namespace {

std::string dims(const Matrix& M) {
    std::ostringstream os;
    os << M.rows() << "x" << M.cols();
    return os.str();
}

}  // namespace

StateSpace::StateSpace(Matrix A, Matrix B, Matrix C, Matrix D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
    const auto n = A_.rows();
    const auto m = B_.cols();
    const auto p = C_.rows();
    if (n < 1 || m < 1 || p < 1 || A_.cols() != n || B_.rows() != n ||
        C_.cols() != n || D_.rows() != p || D_.cols() != m) {
        throw InvalidArgument("StateSpace: inconsistent dimensions A=" + dims(A_) +
                              " B=" + dims(B_) + " C=" + dims(C_) +
                              " D=" + dims(D_));
    }
}

double StateSpace::spectral_radius() const {
    return A_.eigenvalues().cwiseAbs().maxCoeff();
}

StateSpace benchmark_system() {
    Matrix A(3, 3);
    A << 0.8, -0.1, 0.0,
         0.1, 0.7, 0.1,
         0.0, -0.2, 0.6;
    Matrix B(3, 2);
    B << 1.0, 0.0,
         0.0, 1.0,
         0.5, 0.5;
    return StateSpace(A, B, Matrix::Identity(3, 3), Matrix::Zero(3, 2));
}

void Dataset::check() const {
    if (experiments.empty()) throw InvalidArgument("Dataset: Nt must be >= 1");
    for (const auto& e : experiments) {
        if (e.u.rows() != N || e.y.rows() != N || e.u.cols() != m ||
            e.y.cols() != p) {
            throw InvalidArgument("Dataset: experiment shape differs from (N, m, p)");
        }
    }
}

std::string to_string(NoiseFamily f) {
    switch (f) {
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::uniform: return "uniform";
        case NoiseFamily::shifted_exponential: return "shifted-exponential";
    }
    return "?";
}

NoiseFamily noise_family_from_string(const std::string& s) {
    if (s == "gaussian") return NoiseFamily::gaussian;
    if (s == "uniform") return NoiseFamily::uniform;
    if (s == "shifted-exponential") return NoiseFamily::shifted_exponential;
    throw InvalidArgument("unknown noise family '" + s + "'");
}

NoiseSpec::NoiseSpec(NoiseFamily family, double m1, double m2)
    : family_(family), m1_(m1), m2_(m2) {
    if (!std::isfinite(m1) || !std::isfinite(m2))
        throw InvalidArgument("NoiseSpec: moments must be finite");
    // m2 == m1^2 can come out slightly negative in floating point.
    if (variance() < -1e-12 * std::max(1.0, m2))
        throw InvalidArgument("NoiseSpec: m2 - m1^2 must be >= 0");
}

double NoiseSpec::sample(Rng& rng) const {
    const double var = std::max(0.0, variance());
    if (var == 0.0) return m1_;
    const double sd = std::sqrt(var);
    switch (family_) {
        case NoiseFamily::gaussian:
            return std::normal_distribution<double>(m1_, sd)(rng);
        case NoiseFamily::uniform: {
            const double half = std::sqrt(3.0) * sd;
            return std::uniform_real_distribution<double>(m1_ - half, m1_ + half)(rng);
        }
        case NoiseFamily::shifted_exponential:
            return (m1_ - sd) + std::exponential_distribution<double>(1.0 / sd)(rng);
    }
    return m1_;
}

Experiment simulate(const StateSpace& ss, const Vector& x0, const Matrix& U) {
    if (x0.size() != ss.n())
        throw InvalidArgument("simulate: x0 has wrong dimension");
    if (U.cols() != ss.m())
        throw InvalidArgument("simulate: U must have m columns");
    const Eigen::Index N = U.rows();
    Experiment e{U, Matrix(N, ss.p())};
    Vector x = x0;
    for (Eigen::Index k = 0; k < N; ++k) {
        const Vector uk = U.row(k).transpose();
        e.y.row(k) = (ss.C() * x + ss.D() * uk).transpose();
        x = ss.A() * x + ss.B() * uk;
    }
    return e;
}

Matrix generate_pe_input(int N, int m, int order, Rng& rng) {
    return generate_pe_input(N, m, order, rng, [](Rng& r) {
        return std::normal_distribution<double>(0.0, 1.0)(r);
    });
}

Matrix generate_pe_input(int N, int m, int order, Rng& rng,
                         const ScalarSampler& sampler) {
    if (m < 1 || order < 1)
        throw InvalidArgument("generate_pe_input: m and order must be positive");
    // H_order(u) has N-order+1 columns and needs m*order of them.
    if (N < (m + 1) * order - 1) {
        throw InfeasibleRequest("generate_pe_input: N=" + std::to_string(N) +
                                " too short for order " + std::to_string(order) +
                                " with m=" + std::to_string(m));
    }
    Matrix U(N, m);
    for (int attempt = 0; attempt < kPeMaxAttempts; ++attempt) {
        for (int k = 0; k < N; ++k)
            for (int c = 0; c < m; ++c) U(k, c) = sampler(rng);
        if (pe_order_check(U, order)) return U;
    }
    throw GenerationFailure("generate_pe_input: no persistently exciting draw after " +
                            std::to_string(kPeMaxAttempts) + " attempts");
}

Dataset generate_dataset(const StateSpace& ss, int Nt, int N, int L,
                         const InitialStatePolicy& x0, std::uint64_t seed,
                         unsigned workers) {
    if (Nt < 1) throw InvalidArgument("generate_dataset: Nt must be >= 1");
    if (L < 1 || N < L) throw InvalidArgument("generate_dataset: need N >= L >= 1");
    const int order = L + ss.n();
    if (N < (ss.m() + 1) * order - 1) {
        throw InfeasibleRequest("generate_dataset: N=" + std::to_string(N) +
                                " cannot be persistently exciting of order L+n=" +
                                std::to_string(order));
    }
    Dataset ds;
    ds.N = N;
    ds.m = ss.m();
    ds.p = ss.p();
    ds.experiments.resize(static_cast<std::size_t>(Nt));
    parallel_for(ds.experiments.size(), workers, [&](std::size_t i) {
        Rng in_rng(derive_seed(seed, stream_tag::input, i));
        Rng x_rng(derive_seed(seed, stream_tag::initial_state, i));
        Vector x(ss.n());
        if (x0.kind == InitialStatePolicy::Kind::zero) {
            x.setZero();
        } else {
            std::uniform_real_distribution<double> box(-x0.half_width, x0.half_width);
            for (int j = 0; j < ss.n(); ++j) x(j) = box(x_rng);
        }
        ds.experiments[i] = simulate(ss, x, generate_pe_input(N, ss.m(), order, in_rng));
    });
    return ds;
}

Dataset add_noise(const Dataset& ds, const NoiseSpec& spec_u,
                  const NoiseSpec& spec_y, std::uint64_t seed, unsigned workers) {
    ds.check();
    Dataset out = ds;
    parallel_for(out.experiments.size(), workers, [&](std::size_t i) {
        Rng u_rng(derive_seed(seed, stream_tag::input_noise, i));
        Rng y_rng(derive_seed(seed, stream_tag::output_noise, i));
        auto& e = out.experiments[i];
        for (Eigen::Index k = 0; k < e.u.rows(); ++k)
            for (Eigen::Index c = 0; c < e.u.cols(); ++c) e.u(k, c) += spec_u.sample(u_rng);
        for (Eigen::Index k = 0; k < e.y.rows(); ++k)
            for (Eigen::Index c = 0; c < e.y.cols(); ++c) e.y(k, c) += spec_y.sample(y_rng);
    });
    return out;
}

}  // namespace hankelinv
