#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "hankelinv/hankel.hpp"
#include "hankelinv/validate.hpp"
#include "test_support.hpp"

#include <set>

using namespace hankelinv;

TEST_CASE("hankel: worked examples") {
    SUBCASE("scalar ramp") {
        Matrix seq(4, 1);
        seq << 1, 2, 3, 4;
        Matrix want(2, 3);
        want << 1, 2, 3,
                2, 3, 4;
        CHECK(hankel(seq, 2) == want);
    }
    SUBCASE("constant sequence has rank one") {
        const Matrix H = hankel(Matrix::Constant(3, 1, 5.0), 2);
        CHECK(H == Matrix::Constant(2, 2, 5.0));
        CHECK(testsupport::qr_rank(H) == 1);
    }
    SUBCASE("two channels stack lag-major") {
        Matrix seq(3, 2);
        seq << 1, 10,
               2, 20,
               3, 30;
        Matrix want(4, 2);
        want << 1, 2,
                10, 20,
                2, 3,
                20, 30;
        CHECK(hankel(seq, 2) == want);
    }
    SUBCASE("too short") {
        CHECK_THROWS_AS(hankel(Matrix::Zero(2, 1), 3), InvalidArgument);
        CHECK_THROWS_AS(hankel(Matrix::Zero(2, 1), 0), InvalidArgument);
    }
}

TEST_CASE("hankel: anti-diagonals are constant for a scalar channel") {
    const Matrix seq = Matrix::Random(17, 1);
    for (int L = 1; L <= 6; ++L) {
        const Matrix H = hankel(seq, L);
        for (int r = 0; r + 1 < H.rows(); ++r)
            for (int s = 1; s < H.cols(); ++s) CHECK(H(r, s) == H(r + 1, s - 1));
    }
}

TEST_CASE("row_index") {
    CHECK(row_index(SignalKind::input, 0, 0, 2, 3, 2) == 0);
    CHECK(row_index(SignalKind::output, 0, 0, 2, 3, 2) == 4);
    CHECK(row_index(SignalKind::output, 2, 1, 2, 3, 2) == 9);
    CHECK_THROWS_AS(row_index(SignalKind::input, 2, 0, 2, 3, 2), InvalidArgument);
    CHECK_THROWS_AS(row_index(SignalKind::output, 0, 2, 2, 3, 2), InvalidArgument);
    CHECK_THROWS_AS(row_index(SignalKind::output, -1, 0, 2, 3, 2), InvalidArgument);

    SUBCASE("bijection onto the stacked rows") {
        for (int m = 1; m <= 3; ++m)
            for (int p = 1; p <= 3; ++p)
                for (int L = 1; L <= 4; ++L) {
                    const HankelLayout lay{m, p, L};
                    std::set<int> seen;
                    for (int l = 0; l < L; ++l) {
                        for (int c = 0; c < m; ++c) {
                            const int r = lay.row_index(SignalKind::input, c, l);
                            CHECK(lay.kind_of(r) == SignalKind::input);
                            seen.insert(r);
                        }
                        for (int c = 0; c < p; ++c) {
                            const int r = lay.row_index(SignalKind::output, c, l);
                            CHECK(lay.kind_of(r) == SignalKind::output);
                            seen.insert(r);
                        }
                    }
                    CHECK(seen.size() == static_cast<std::size_t>(lay.rows()));
                    CHECK(*seen.begin() == 0);
                    CHECK(*seen.rbegin() == lay.rows() - 1);
                }
    }
}

TEST_CASE("stacked_hankel") {
    SUBCASE("scalar concatenation order") {
        Experiment e{Matrix(3, 1), Matrix(3, 1)};
        e.u << 1, 2, 3;
        e.y << 4, 5, 6;
        Matrix want(4, 2);
        want << 1, 2,
                2, 3,
                4, 5,
                5, 6;
        CHECK(stacked_hankel(e, 2).matrix == want);
    }
    SUBCASE("rows match the signal slice named by row_index") {
        Experiment e{Matrix::Random(9, 2), Matrix::Random(9, 3)};
        for (int L = 1; L <= 4; ++L) {
            const StackedHankel H = stacked_hankel(e, L);
            const int Nc = 9 - L + 1;
            for (int l = 0; l < L; ++l) {
                for (int c = 0; c < 2; ++c)
                    for (int k = 0; k < Nc; ++k)
                        CHECK(H.matrix(H.layout.row_index(SignalKind::input, c, l), k) ==
                              e.u(l + k, c));
                for (int c = 0; c < 3; ++c)
                    for (int k = 0; k < Nc; ++k)
                        CHECK(H.matrix(H.layout.row_index(SignalKind::output, c, l), k) ==
                              e.y(l + k, c));
            }
        }
    }
    SUBCASE("benchmark shape and noiseless rank mL+n") {
        const Dataset ds = generate_dataset(benchmark_system(), 20, 30, 2, {}, 4);
        for (const auto& e : ds.experiments) {
            const StackedHankel H = stacked_hankel(e, 2);
            CHECK(H.matrix.rows() == 10);
            CHECK(H.matrix.cols() == 29);
            CHECK(testsupport::qr_rank(H.matrix, 1e-10) == 7);
            CHECK(numerical_rank_of(H.matrix, kDefaultRankTol) == 7);
        }
    }
    SUBCASE("length mismatch") {
        Experiment e{Matrix::Zero(5, 1), Matrix::Zero(4, 1)};
        CHECK_THROWS_AS(stacked_hankel(e, 2), InvalidArgument);
    }
}

TEST_CASE("every column of a noiseless stacked Hankel is annihilated by the null space") {
    const StateSpace ss = benchmark_system();
    const SubspaceBasis V = true_nullspace(ss, 2);
    const Dataset ds = generate_dataset(ss, 10, 30, 2, {}, 8);
    for (const auto& e : ds.experiments) {
        const Matrix H = stacked_hankel(e, 2).matrix;
        CHECK((V.basis * H).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("pe_order_check") {
    Rng rng(5);
    SUBCASE("gaussian input is exciting") {
        Matrix U(30, 2);
        std::normal_distribution<double> g;
        for (int i = 0; i < U.size(); ++i) U.data()[i] = g(rng);
        CHECK(pe_order_check(U, 5));
    }
    SUBCASE("constant input is not") { CHECK_FALSE(pe_order_check(Matrix::Constant(10, 1, 3.0), 2)); }
    SUBCASE("impulses") {
        for (int order = 1; order <= 6; ++order) {
            // Impulse at k = 0: entry (l, k) is nonzero only for l + k = 0.
            Matrix U = Matrix::Zero(2 * order, 1);
            U(0, 0) = 1.0;
            CHECK(testsupport::qr_rank(hankel(U, order)) == 1);
            CHECK(pe_order_check(U, order) == (order == 1));
            // Impulse at k = order-1: the first `order` columns form the
            // reversed identity.
            Matrix V = Matrix::Zero(2 * order, 1);
            V(order - 1, 0) = 1.0;
            CHECK(hankel(V, order).leftCols(order) == Matrix::Identity(order, order).rowwise().reverse());
            CHECK(pe_order_check(V, order));
        }
    }
    SUBCASE("shorter than the order") { CHECK_FALSE(pe_order_check(Matrix::Ones(2, 1), 3)); }
}
