#pragma once

// Helpers shared by the unit tests. Nothing here calls into the code paths
// being checked except where a test needs data to feed them.

#include "hankelinv/lti_sim.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <random>

namespace testsupport {

using hankelinv::Matrix;
using hankelinv::Vector;

/// Random (A, B, C, D) with spectral radius of A scaled to `radius`.
inline hankelinv::StateSpace random_stable_system(int n, int m, int p, std::uint64_t seed,
                                                  double radius = 0.9, bool with_D = true) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    auto draw = [&](int r, int c) {
        Matrix M(r, c);
        for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j) M(i, j) = g(rng);
        return M;
    };
    Matrix A = draw(n, n);
    const double rho = A.eigenvalues().cwiseAbs().maxCoeff();
    A *= radius / rho;
    Matrix D = with_D ? draw(p, m) : Matrix::Zero(p, m);
    return hankelinv::StateSpace(A, draw(n, m), draw(p, n), D);
}

/// Rank by column-pivoted QR: an independent route from the SVD cutoff the
/// library uses.
inline int qr_rank(const Matrix& M, double rel_tol = 1e-10) {
    Eigen::ColPivHouseholderQR<Matrix> qr(M);
    qr.setThreshold(rel_tol);
    return static_cast<int>(qr.rank());
}

inline double rel_frobenius(const Matrix& a, const Matrix& b) {
    const double denom = std::max(a.norm(), b.norm());
    return denom == 0.0 ? 0.0 : (a - b).norm() / denom;
}

}  // namespace testsupport
