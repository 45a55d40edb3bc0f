#include "hankelinv/validate.hpp"

#include "hankelinv/hankel.hpp"
#include "hankelinv/stats.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>

namespace hankelinv {

namespace {

constexpr double kOracleRankTol = 1e-10;

}  // namespace

SubspaceBasis true_nullspace(const StateSpace& ss, int L) {
    if (L < 1) throw InvalidArgument("true_nullspace: L must be >= 1");
    const int n = ss.n(), m = ss.m(), p = ss.p();
    const int order = L + n;
    // Enough columns for rank mL + n with margin.
    const int N = (m + 1) * order + L + 4 * (m + p) * L;
    Rng rng(derive_seed(0, stream_tag::oracle, static_cast<std::uint64_t>(L)));
    const Matrix U = generate_pe_input(N, m, order, rng);
    const Experiment e = simulate(ss, Vector::Zero(n), U);
    const Matrix H = stacked_hankel(e, L).matrix;

    Eigen::JacobiSVD<Matrix> svd(H, Eigen::ComputeFullU);
    const Vector s = svd.singularValues();
    const int d = static_cast<int>(H.rows());
    int nullity = d - static_cast<int>(s.size());
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) < kOracleRankTol * s(0)) ++nullity;
    if (nullity != p * L - n) {
        throw OracleFailure("true_nullspace: observed nullity " + std::to_string(nullity) +
                            ", expected pL-n = " + std::to_string(p * L - n));
    }
    return SubspaceBasis{svd.matrixU().rightCols(nullity).transpose()};
}

SubspaceError subspace_angle(const SubspaceBasis& v_true, const SubspaceBasis& v_hat) {
    if (v_true.k() != v_hat.k() || v_true.d() != v_hat.d())
        throw InvalidArgument("subspace_angle: bases have different shapes");
    if (v_true.orthonormality_error() > 1e-8 || v_hat.orthonormality_error() > 1e-8)
        throw InvalidArgument("subspace_angle: basis rows are not orthonormal");
    SubspaceError err;
    if (v_true.k() == 0) {
        err.cosines.resize(0);
        return err;
    }
    const Matrix inner = v_true.basis * v_hat.basis.transpose();
    err.cosines = Eigen::JacobiSVD<Matrix>(inner).singularValues();
    // Orthonormality bounds these by 1; rounding can overshoot slightly.
    err.cosines = err.cosines.cwiseMin(1.0).cwiseMax(0.0);
    // acos loses half the digits near 1; the sine of the largest angle is the
    // norm of the part of v_hat outside span(v_true).
    const Matrix outside = v_hat.basis - (v_hat.basis * v_true.basis.transpose()) * v_true.basis;
    const double sin_max = Eigen::JacobiSVD<Matrix>(outside).singularValues()(0);
    err.theta_max = std::atan2(std::min(sin_max, 1.0), err.cosines.minCoeff());
    return err;
}

std::uint64_t replicate_seed(std::uint64_t root_seed, int replicate) {
    return derive_seed(root_seed, stream_tag::replicate, static_cast<std::uint64_t>(replicate));
}

double median_with_missing(std::vector<std::optional<double>> values) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::vector<double> v;
    v.reserve(values.size());
    for (const auto& x : values) v.push_back(x ? *x : std::numeric_limits<double>::infinity());
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    if (n % 2 == 1) return v[n / 2];
    const double a = v[n / 2 - 1], b = v[n / 2];
    if (std::isinf(a) || std::isinf(b)) return std::isinf(a) ? a : b;
    return 0.5 * (a + b);
}

StudyResult convergence_study(const StudySetup& setup) {
    for (std::size_t i = 1; i < setup.nt_list.size(); ++i)
        if (setup.nt_list[i] <= setup.nt_list[i - 1])
            throw InvalidArgument("convergence_study: Nt list must be ascending");
    if (setup.nt_list.empty() || setup.nt_list.front() < 1)
        throw InvalidArgument("convergence_study: Nt list must be non-empty and positive");
    if (setup.seeds < 1) throw InvalidArgument("convergence_study: need at least one seed");

    const SubspaceBasis v_true = true_nullspace(setup.system, setup.L);
    StudyResult out;
    for (int Nt : setup.nt_list) {
        std::vector<std::optional<double>> thetas;
        for (int s = 0; s < setup.seeds; ++s) {
            const std::uint64_t seed = replicate_seed(setup.root_seed, s);
            const Dataset clean = generate_dataset(setup.system, Nt, setup.N, setup.L,
                                                   setup.x0, seed, setup.workers);
            const Dataset noisy =
                add_noise(clean, setup.noise_u, setup.noise_y, seed, setup.workers);
            const AveragedStats st = aggregate(noisy, setup.L, setup.workers).finalize();
            GridSearchOptions opts = setup.search;
            opts.nullity = setup.system.p() * setup.L - setup.system.n();
            const GridSearchResult res = grid_search(st, setup.grid, opts);
            StudyCell cell{Nt, s, std::nullopt, std::nullopt};
            if (res.best) {
                cell.theta_max = subspace_angle(v_true, res.best->nullspace).theta_max;
                cell.best = res.best->point;
            }
            thetas.push_back(cell.theta_max);
            out.cells.push_back(cell);
        }
        out.summary.push_back({Nt, median_with_missing(thetas)});
    }
    return out;
}

}  // namespace hankelinv
