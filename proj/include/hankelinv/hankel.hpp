#pragma once

#include "hankelinv/common.hpp"
#include "hankelinv/lti_sim.hpp"

namespace hankelinv {

enum class SignalKind { input, output };

/// Row layout of a stacked input/output Hankel matrix of depth L.
///
/// Input block first (mL rows), output block after (pL rows). Within a
/// block rows are lag-major, channel-minor: lag 0 for every channel, then
/// lag 1, and so on.
struct HankelLayout {
    int m = 0;
    int p = 0;
    int L = 0;

    int rows() const noexcept { return (m + p) * L; }

    /// Throws InvalidArgument on out-of-range arguments.
    int row_index(SignalKind kind, int channel, int lag) const;

    SignalKind kind_of(int row) const;

    friend bool operator==(const HankelLayout&, const HankelLayout&) = default;
};

int row_index(SignalKind kind, int channel, int lag, int m, int p, int L);

/// Block Hankel matrix of depth L for an N x c signal: (cL) x (N-L+1),
/// entry (l*c + ch, k) = seq(l + k, ch).
Matrix hankel(const Matrix& seq, int L);

struct StackedHankel {
    Matrix matrix;  // (m+p)L x (N-L+1)
    HankelLayout layout;

    int columns() const noexcept { return static_cast<int>(matrix.cols()); }
};

StackedHankel stacked_hankel(const Experiment& e, int L);

inline constexpr double kDefaultRankTol = 1e-10;

/// Number of singular values strictly above tol * sigma_max.
int numerical_rank_of(const Matrix& M, double rel_tol);

/// True iff hankel(U, order) has numerical rank m * order.
bool pe_order_check(const Matrix& U, int order, double tol = kDefaultRankTol);

}  // namespace hankelinv
