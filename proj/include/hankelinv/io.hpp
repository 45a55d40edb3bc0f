#pragma once

#include "hankelinv/estimator.hpp"
#include "hankelinv/lti_sim.hpp"
#include "hankelinv/stats.hpp"
#include "hankelinv/validate.hpp"

#include <filesystem>
#include <functional>
#include <stdexcept>
#include <string>

namespace hankelinv {

/// File could not be opened, read, or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed file content.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace fs = std::filesystem;

/// Decimal with 17 significant digits; "inf", "-inf", "nan" otherwise.
std::string format_real(double x);

// Dataset JSON Lines: a {"meta": {...}} header, then one
// {"i": k, "u": [[...]...], "y": [[...]...]} line per experiment.
void write_dataset_jsonl(const fs::path& path, const Dataset& ds);
Dataset read_dataset_jsonl(const fs::path& path);

struct DatasetMeta {
    int Nt = 0;
    int N = 0;
    int m = 0;
    int p = 0;
};

/// Streams experiments in file order without holding the whole dataset.
DatasetMeta for_each_experiment(const fs::path& path,
                                const std::function<void(const Experiment&)>& fn);

/// Streaming aggregation of a dataset file at depth L; bitwise identical to
/// aggregate(read_dataset_jsonl(path), L).
SufficientStats aggregate_jsonl(const fs::path& path, int L);

// Stats snapshot: {"d", "Nc", "count", "m", "p", "L", "G" (row-major), "rowsum"}
// with G and rowsum as running sums.
void write_stats_json(const fs::path& path, const SufficientStats& st);
SufficientStats read_stats_json(const fs::path& path);

/// identical: m1,m2,sigma_min,numerical_rank,admitted
/// distinct:  m1u,m2u,m1y,m2y,sigma_min,numerical_rank,admitted
void write_landscape_csv(const fs::path& path, const GridSearchResult& res, MomentMode mode);

/// {m1, m2, sigma_min, nullspace, singular_values} (m1u/m2u/m1y/m2y in
/// distinct mode).
void write_candidate_json(const fs::path& path, const Candidate& c, MomentMode mode);
Candidate read_candidate_json(const fs::path& path);

void write_convergence_csv(const fs::path& path, const StudyResult& res);
void write_summary_csv(const fs::path& path, const StudyResult& res);

std::string read_text(const fs::path& path);
void write_text(const fs::path& path, const std::string& text);

}  // namespace hankelinv
