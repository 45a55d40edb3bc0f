#pragma once

#include "hankelinv/common.hpp"
#include "hankelinv/hankel.hpp"
#include "hankelinv/lti_sim.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace hankelinv {

/// Ensemble averages of the (noisy) stacked Hankel rows.
///   G(r, s)   = mean over experiments of  h_r . h_s
///   rowsum(r) = mean over experiments of  sum_k h_r(k)
struct AveragedStats {
    HankelLayout layout;
    int Nc = 0;
    std::int64_t count = 0;
    Matrix G;
    Vector rowsum;

    int d() const noexcept { return layout.rows(); }
};

/// Mergeable running sums of stacked-Hankel row products. Raw experiments
/// are never retained: G and rowsum are all the estimator needs.
class SufficientStats {
public:
    SufficientStats() = default;
    SufficientStats(HankelLayout layout, int Nc);

    const HankelLayout& layout() const noexcept { return layout_; }
    int d() const noexcept { return layout_.rows(); }
    int Nc() const noexcept { return Nc_; }
    std::int64_t count() const noexcept { return count_; }
    const Matrix& G() const noexcept { return G_; }
    const Vector& rowsum() const noexcept { return rowsum_; }

    /// G += H H^T, rowsum += H 1, count += 1. G stays exactly symmetric.
    void accumulate(const StackedHankel& H);

    /// Componentwise sum. Throws InvalidArgument on shape mismatch.
    static SufficientStats merge(const SufficientStats& a, const SufficientStats& b);

    /// Divides by count. Throws EmptyEnsemble when count == 0.
    AveragedStats finalize() const;

    /// Rebuilds a snapshot (used by the stats file reader).
    static SufficientStats from_parts(HankelLayout layout, int Nc, std::int64_t count,
                                      Matrix G, Vector rowsum);

private:
    HankelLayout layout_;
    int Nc_ = 0;
    std::int64_t count_ = 0;
    Matrix G_;
    Vector rowsum_;
};

SufficientStats accumulate(SufficientStats st, const StackedHankel& H);
SufficientStats merge(const SufficientStats& a, const SufficientStats& b);
AveragedStats finalize(const SufficientStats& st);

inline constexpr std::size_t kReductionBlock = 64;

/// Canonical reduction order shared by every aggregation path.
///
/// Experiments are grouped into consecutive blocks of kReductionBlock; each
/// block is summed serially and the block sums are folded with a
/// binary-counter pairwise tree in block order. Given the same experiment
/// sequence the result is bitwise identical whether the blocks were
/// produced serially, in parallel, or streamed from disk.
class StatsReducer {
public:
    StatsReducer(HankelLayout layout, int Nc);

    void push(const StackedHankel& H);
    void push_block(SufficientStats block);
    /// Installs a trailing block of fewer than kReductionBlock experiments,
    /// as if they had been push()ed one by one. Only valid with nothing pending.
    void set_tail(SufficientStats partial, std::size_t experiments);

    SufficientStats result() const;

private:
    void flush_block();

    HankelLayout layout_;
    int Nc_;
    SufficientStats pending_;
    std::size_t pending_count_ = 0;
    // stack_[i] holds the sum of 2^i blocks, or is empty.
    std::vector<std::optional<SufficientStats>> stack_;
};

/// Aggregates every experiment of ds at depth L. Output is independent of
/// the worker count.
SufficientStats aggregate(const Dataset& ds, int L, unsigned workers = 1);

/// Aggregates a contiguous experiment range [begin, end) in canonical order.
/// aggregate() over shards merged by merge() agrees with the serial result up
/// to floating-point reassociation.
SufficientStats aggregate_range(const Dataset& ds, int L, std::size_t begin,
                                std::size_t end, unsigned workers = 1);

/// Direct (1/Nt) sum_i H_i H_i^T, bypassing the statistics path.
Matrix noiseless_M(const Dataset& ds, int L);

}  // namespace hankelinv
