#pragma once

#include "hankelinv/estimator.hpp"
#include "hankelinv/lti_sim.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hankelinv {

/// Ground-truth left null space of the noiseless stacked Hankel matrix of
/// depth L, computed from one long persistently exciting experiment.
/// Throws OracleFailure when the observed nullity is not pL - n.
SubspaceBasis true_nullspace(const StateSpace& ss, int L);

struct SubspaceError {
    double theta_max = 0.0;  // radians, in [0, pi/2]
    Vector cosines;          // singular values of V_true * V_hat^T, descending
};

/// Largest principal angle between two row-orthonormal bases of equal shape.
/// Throws InvalidArgument on shape mismatch or bases that are not
/// orthonormal to 1e-8.
SubspaceError subspace_angle(const SubspaceBasis& v_true, const SubspaceBasis& v_hat);

struct StudySetup {
    StateSpace system = benchmark_system();
    NoiseSpec noise_u;
    NoiseSpec noise_y;
    int N = 30;
    int L = 2;
    InitialStatePolicy x0;
    MomentGrid grid;
    GridSearchOptions search;
    std::vector<int> nt_list;
    int seeds = 1;
    std::uint64_t root_seed = 0;
    unsigned workers = 1;
};

struct StudyCell {
    int Nt = 0;
    int seed = 0;
    std::optional<double> theta_max;  // empty: no admitted candidate
    std::optional<MomentPoint> best;
};

struct StudySummary {
    int Nt = 0;
    double median_theta_max = 0.0;  // +inf when most cells had no candidate
};

struct StudyResult {
    std::vector<StudyCell> cells;  // Nt-major, then seed
    std::vector<StudySummary> summary;
};

/// Replicate seed s uses derive_seed(root_seed, replicate, s) for every Nt, so
/// the larger datasets extend the smaller ones.
std::uint64_t replicate_seed(std::uint64_t root_seed, int replicate);

/// Median with missing values ranked as +inf.
double median_with_missing(std::vector<std::optional<double>> values);

StudyResult convergence_study(const StudySetup& setup);

}  // namespace hankelinv
