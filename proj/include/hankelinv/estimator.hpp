#pragma once

#include "hankelinv/common.hpp"
#include "hankelinv/stats.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hankelinv {

/// Candidate first/second raw noise moments, separately for the input and
/// output channels. Identical-moment mode ties the two pairs together.
struct MomentPoint {
    double m1u = 0.0;
    double m2u = 0.0;
    double m1y = 0.0;
    double m2y = 0.0;

    static MomentPoint identical(double m1, double m2) { return {m1, m2, m1, m2}; }

    bool is_identical() const noexcept { return m1u == m1y && m2u == m2y; }

    friend bool operator==(const MomentPoint&, const MomentPoint&) = default;
};

/// Moment-corrected estimate of the noiseless correlation matrix.
///
/// With mu(r), nu(r) the first/second moment of the channel that row r
/// belongs to:
///   M(r, r) = G(r, r) - 2 mu(r) rowsum(r) + Nc (2 mu(r)^2 - nu(r))
///   M(r, s) = G(r, s) - mu(r) rowsum(s) - mu(s) rowsum(r) + Nc mu(r) mu(s)
/// The result is symmetric by construction. Moment points with m2 < m1^2 are
/// evaluated like any other.
Matrix assemble_M(const AveragedStats& st, const MomentPoint& pt);

/// Orthonormal rows spanning a subspace of R^d.
struct SubspaceBasis {
    Matrix basis;  // k x d

    int k() const noexcept { return static_cast<int>(basis.rows()); }
    int d() const noexcept { return static_cast<int>(basis.cols()); }

    /// max |B B^T - I|.
    double orthonormality_error() const;
};

struct Spectrum {
    Vector values;   // descending, nonnegative
    Matrix vectors;  // d x d, column j pairs with values(j)
};

/// Full SVD of (M + M^T) / 2. Throws NumericError on non-finite input.
Spectrum svd_spectrum(const Matrix& M);

/// Singular values only (descending).
Vector singular_values(const Matrix& M);

/// Count of singular values above eps_rank * sigma_max.
int numerical_rank(const Matrix& M, double eps_rank);

/// Uniform grid of `points` values over [lo, hi] (just lo when points == 1).
struct GridAxis {
    double lo = 0.0;
    double hi = 0.0;
    int points = 1;

    double value(int i) const;
    void check(const std::string& name) const;
};

enum class MomentMode { identical, distinct };

std::string to_string(MomentMode mode);
MomentMode moment_mode_from_string(const std::string& s);

/// Cartesian product of moment axes, flattened in row-major order.
/// identical: axes = {m1, m2}; distinct: axes = {m1u, m2u, m1y, m2y}.
struct MomentGrid {
    MomentMode mode = MomentMode::identical;
    std::vector<GridAxis> axes;

    static MomentGrid identical(GridAxis m1, GridAxis m2);
    static MomentGrid distinct(GridAxis m1u, GridAxis m2u, GridAxis m1y, GridAxis m2y);

    std::size_t size() const;
    MomentPoint point(std::size_t flat) const;
    void check() const;
};

enum class EpsMode { absolute, relative };
std::string to_string(EpsMode mode);
EpsMode eps_mode_from_string(const std::string& s);

/// How the best admitted point is chosen.
///   min_sigma:     smallest minimum singular value.
///   nullity_sigma: smallest `nullity`-th smallest singular value, i.e. the
///                  point where the whole candidate null space is tightest.
enum class Selection { min_sigma, nullity_sigma };
std::string to_string(Selection s);
Selection selection_from_string(const std::string& s);

struct GridSearchOptions {
    double eps_sigma = 1e-3;
    EpsMode eps_mode = EpsMode::absolute;
    int nullity = 0;  // pL - n
    double eps_rank = 1e-2;
    Selection selection = Selection::min_sigma;
    unsigned workers = 1;
};

struct LandscapePoint {
    MomentPoint point;
    double sigma_min = 0.0;
    double sigma_nullity = 0.0;  // nullity-th smallest singular value
    int numerical_rank = 0;
    bool admitted = false;
};

struct Candidate {
    MomentPoint point;
    double sigma_min = 0.0;
    SubspaceBasis nullspace;  // nullity x d
    Vector singular_values;   // descending
};

struct GridSearchResult {
    std::vector<LandscapePoint> landscape;  // one per grid point, row-major
    std::vector<Candidate> candidates;      // admitted points, grid order
    std::optional<Candidate> best;
    std::optional<std::size_t> best_index;  // into landscape
};

/// Admission: exactly `nullity` singular values below the threshold
/// (eps_sigma, or eps_sigma * sigma_max in relative mode). Ties in the
/// selection key go to the first point in grid order.
GridSearchResult grid_search(const AveragedStats& st, const MomentGrid& grid,
                             const GridSearchOptions& opts);

/// Candidate for a single moment point (no admission test).
Candidate evaluate_point(const AveragedStats& st, const MomentPoint& pt, int nullity);

}  // namespace hankelinv
