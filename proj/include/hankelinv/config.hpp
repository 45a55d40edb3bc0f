#pragma once

#include "hankelinv/estimator.hpp"
#include "hankelinv/lti_sim.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace hankelinv {

/// Configuration rejected before any work or file output.
struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NoiseConfig {
    std::string family = "gaussian";
    double m1 = 1.0;
    double m2 = 5.0;

    NoiseSpec spec() const { return {noise_family_from_string(family), m1, m2}; }
};

/// One reproducible experiment. Every field defaults to the benchmark run:
/// the 3-state system, Nt = 10000 fragments of N = 30 samples, depth L = 2,
/// Gaussian noise with mean 1 and standard deviation 2 on all channels, and
/// a 200 x 200 grid over [0, 1.5] x [2.5, 7].
struct ExperimentConfig {
    std::string system_preset = "benchmark";  // empty when matrices are inline
    std::optional<StateSpace> inline_system;

    int Nt = 10000;
    int N = 30;
    int L = 2;

    InitialStatePolicy x0;

    NoiseConfig noise_u;
    NoiseConfig noise_y;

    MomentMode moment_mode = MomentMode::identical;
    GridAxis grid_m1{0.0, 1.5, 200};
    GridAxis grid_m2{2.5, 7.0, 200};
    GridAxis grid_m1u{0.0, 1.5, 20};
    GridAxis grid_m2u{2.5, 7.0, 20};
    GridAxis grid_m1y{0.0, 1.5, 20};
    GridAxis grid_m2y{2.5, 7.0, 20};

    double eps_sigma = 1e-3;
    EpsMode eps_mode = EpsMode::absolute;
    double eps_rank = 1e-2;
    Selection selection = Selection::min_sigma;

    std::uint64_t seed = 1;
    unsigned workers = 1;

    StateSpace system() const;
    MomentGrid grid() const;
    /// nullity is filled from the system (pL - n).
    GridSearchOptions search_options() const;
    int nullity() const;

    /// Throws ConfigError (or InvalidArgument from the system) when invalid,
    /// including an N too short for persistently exciting inputs of order L+n.
    void validate() const;

    nlohmann::json to_json() const;
    /// Accepts a config object or a run manifest carrying one under "config".
    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::filesystem::path& path);
};

StateSpace preset_system(const std::string& name);

}  // namespace hankelinv
