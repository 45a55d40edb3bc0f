#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hankelinv/validate.hpp"
#include "test_support.hpp"

#include <cmath>
#include <limits>
#include <numbers>

using namespace hankelinv;

namespace {

StateSpace scalar_system(double a, double b) {
    return StateSpace(Matrix::Constant(1, 1, a), Matrix::Constant(1, 1, b), Matrix::Ones(1, 1),
                      Matrix::Zero(1, 1));
}

SubspaceBasis rows(std::initializer_list<std::initializer_list<double>> r) {
    Matrix B(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
    int i = 0;
    for (const auto& row : r) {
        int j = 0;
        for (double x : row) B(i, j++) = x;
        ++i;
    }
    return {B};
}

}  // namespace

TEST_CASE("true_nullspace of the benchmark system") {
    const SubspaceBasis V = true_nullspace(benchmark_system(), 2);
    CHECK(V.k() == 3);
    CHECK(V.d() == 10);
    CHECK(V.orthonormality_error() < 1e-12);
    // Deterministic.
    CHECK(true_nullspace(benchmark_system(), 2).basis == V.basis);
}

TEST_CASE("true_nullspace of a scalar system") {
    const double a = 0.6, b = -1.3;
    const StateSpace ss = scalar_system(a, b);
    CHECK(true_nullspace(ss, 1).k() == 0);

    // y_{k+1} = a y_k + b u_k, rows ordered (u_0, u_1, y_0, y_1).
    const SubspaceBasis V = true_nullspace(ss, 2);
    REQUIRE(V.k() == 1);
    Vector want(4);
    want << -b, 0.0, -a, 1.0;
    want.normalize();
    CHECK(std::abs(std::abs(V.basis.row(0).dot(want)) - 1.0) < 1e-12);
}

TEST_CASE("true_nullspace annihilates independent trajectories") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const int n = 1 + static_cast<int>(seed % 3), m = 1 + static_cast<int>(seed % 2);
        const int p = 2;
        const StateSpace ss = testsupport::random_stable_system(n, m, p, 300 + seed, 0.9, seed % 2);
        const int L = n + 1;
        const SubspaceBasis V = true_nullspace(ss, L);
        CHECK(V.k() == p * L - n);
        const Dataset ds = generate_dataset(ss, 100, (m + 1) * (L + n) + 3, L,
                                            {InitialStatePolicy::Kind::random_bounded, 1.0}, seed);
        double worst = 0.0, scale = 0.0;
        for (const auto& e : ds.experiments) {
            const Matrix H = stacked_hankel(e, L).matrix;
            worst = std::max(worst, (V.basis * H).cwiseAbs().maxCoeff());
            scale = std::max(scale, H.cwiseAbs().maxCoeff());
        }
        CHECK(worst <= 1e-8 * scale);
    }
}

TEST_CASE("windows of one long benchmark trajectory") {
    const StateSpace ss = benchmark_system();
    const SubspaceBasis V = true_nullspace(ss, 2);
    Rng rng(99);
    const Matrix U = generate_pe_input(400, 2, 5, rng);
    Vector x0(3);
    x0 << 0.4, -1.0, 0.2;
    const Experiment e = simulate(ss, x0, U);
    for (int k = 0; k + 2 <= 400; ++k) {
        Vector w(10);
        w << e.u.row(k).transpose(), e.u.row(k + 1).transpose(), e.y.row(k).transpose(),
            e.y.row(k + 1).transpose();
        CHECK((V.basis * w).norm() <= 1e-9 * std::max(1.0, w.norm()));
    }
    // Breaking the output equation is detected.
    Vector w(10);
    w << e.u.row(7).transpose(), e.u.row(8).transpose(), e.y.row(7).transpose(),
        e.y.row(8).transpose();
    w(9) += 0.05;
    CHECK((V.basis * w).norm() > 1e-3);
}

TEST_CASE("subspace_angle") {
    const SubspaceBasis V = true_nullspace(benchmark_system(), 2);
    SUBCASE("same subspace") {
        CHECK(subspace_angle(V, V).theta_max <= 1e-7);
        // A rotated basis of the same span.
        const Matrix Q = Eigen::HouseholderQR<Matrix>(Matrix::Random(3, 3)).householderQ();
        CHECK(subspace_angle(V, {Q * V.basis}).theta_max <= 1e-7);
    }
    SUBCASE("planar rotation") {
        for (double t : {0.0, 0.1, 0.7, 1.2, std::numbers::pi / 2}) {
            const SubspaceBasis a = rows({{1.0, 0.0, 0.0}});
            const SubspaceBasis b = rows({{std::cos(t), std::sin(t), 0.0}});
            CHECK(subspace_angle(a, b).theta_max == doctest::Approx(t).epsilon(1e-7));
            CHECK(subspace_angle(a, b).theta_max == doctest::Approx(subspace_angle(b, a).theta_max));
        }
    }
    SUBCASE("largest of several angles") {
        const SubspaceBasis a = rows({{1, 0, 0, 0}, {0, 1, 0, 0}});
        const SubspaceBasis b = rows({{std::cos(0.2), 0, std::sin(0.2), 0}, {0, std::cos(0.9), 0, std::sin(0.9)}});
        const SubspaceError err = subspace_angle(a, b);
        CHECK(err.theta_max == doctest::Approx(0.9));
        CHECK(err.cosines(0) == doctest::Approx(std::cos(0.2)));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(subspace_angle(V, rows({{1, 0, 0}})), InvalidArgument);
        SubspaceBasis scaled{2.0 * V.basis};
        CHECK_THROWS_AS(subspace_angle(V, scaled), InvalidArgument);
    }
    SUBCASE("empty") { CHECK(subspace_angle({Matrix(0, 4)}, {Matrix(0, 4)}).theta_max == 0.0); }
}

TEST_CASE("median_with_missing") {
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(median_with_missing({1.0, 3.0, 2.0}) == 2.0);
    CHECK(median_with_missing({1.0, 4.0, 2.0, 3.0}) == 2.5);
    CHECK(median_with_missing({1.0, std::nullopt, 2.0}) == 2.0);
    CHECK(median_with_missing({1.0, std::nullopt, std::nullopt}) == inf);
    CHECK(median_with_missing({1.0, 2.0, std::nullopt, std::nullopt}) == inf);
    CHECK(std::isnan(median_with_missing({})));
}

TEST_CASE("convergence_study on noiseless data") {
    StudySetup setup;
    setup.noise_u = NoiseSpec(NoiseFamily::gaussian, 0.0, 0.0);
    setup.noise_y = setup.noise_u;
    setup.grid = MomentGrid::identical({0.0, 0.5, 3}, {0.0, 1.0, 3});
    setup.search.eps_sigma = 1e-8;
    setup.nt_list = {20, 40};
    setup.seeds = 3;
    const StudyResult res = convergence_study(setup);
    REQUIRE(res.cells.size() == 6);
    REQUIRE(res.summary.size() == 2);
    for (const auto& c : res.cells) {
        REQUIRE(c.theta_max);
        CHECK(*c.theta_max <= 1e-8);
        CHECK(*c.best == MomentPoint::identical(0.0, 0.0));
    }
    CHECK(res.cells[3].Nt == 40);
    CHECK(res.cells[3].seed == 0);
    CHECK(res.summary[1].Nt == 40);

    setup.nt_list = {40, 20};
    CHECK_THROWS_AS(convergence_study(setup), InvalidArgument);
}
