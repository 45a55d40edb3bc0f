#include "hankelinv/stats.hpp"

namespace hankelinv {

SufficientStats::SufficientStats(HankelLayout layout, int Nc)
    : layout_(layout),
      Nc_(Nc),
      G_(Matrix::Zero(layout.rows(), layout.rows())),
      rowsum_(Vector::Zero(layout.rows())) {
    if (layout.rows() < 1 || Nc < 1)
        throw InvalidArgument("SufficientStats: empty shape");
}

void SufficientStats::accumulate(const StackedHankel& H) {
    if (H.layout != layout_ || H.matrix.rows() != d() || H.matrix.cols() != Nc_)
        throw InvalidArgument("accumulate: Hankel shape does not match statistics");
    const Matrix& X = H.matrix;
    const int n = d();
    for (int r = 0; r < n; ++r) {
        for (int s = r; s < n; ++s) {
            const double v = X.row(r).dot(X.row(s));
            G_(r, s) += v;
            if (s != r) G_(s, r) += v;
        }
        rowsum_(r) += X.row(r).sum();
    }
    ++count_;
}

SufficientStats SufficientStats::merge(const SufficientStats& a, const SufficientStats& b) {
    if (a.layout_ != b.layout_ || a.Nc_ != b.Nc_)
        throw InvalidArgument("merge: statistics shapes differ");
    SufficientStats out = a;
    out.G_ += b.G_;
    out.rowsum_ += b.rowsum_;
    out.count_ += b.count_;
    return out;
}

AveragedStats SufficientStats::finalize() const {
    if (count_ == 0) throw EmptyEnsemble("finalize: no experiments absorbed");
    const double inv = 1.0 / static_cast<double>(count_);
    return AveragedStats{layout_, Nc_, count_, G_ * inv, rowsum_ * inv};
}

SufficientStats SufficientStats::from_parts(HankelLayout layout, int Nc,
                                            std::int64_t count, Matrix G, Vector rowsum) {
    SufficientStats st(layout, Nc);
    if (G.rows() != st.d() || G.cols() != st.d() || rowsum.size() != st.d())
        throw InvalidArgument("SufficientStats: G/rowsum size does not match d");
    if (count < 0) throw InvalidArgument("SufficientStats: negative count");
    st.count_ = count;
    st.G_ = std::move(G);
    st.rowsum_ = std::move(rowsum);
    return st;
}

SufficientStats accumulate(SufficientStats st, const StackedHankel& H) {
    st.accumulate(H);
    return st;
}

SufficientStats merge(const SufficientStats& a, const SufficientStats& b) {
    return SufficientStats::merge(a, b);
}

AveragedStats finalize(const SufficientStats& st) { return st.finalize(); }

StatsReducer::StatsReducer(HankelLayout layout, int Nc)
    : layout_(layout), Nc_(Nc), pending_(layout, Nc) {}

void StatsReducer::push(const StackedHankel& H) {
    pending_.accumulate(H);
    if (++pending_count_ == kReductionBlock) flush_block();
}

void StatsReducer::flush_block() {
    SufficientStats block = std::move(pending_);
    pending_ = SufficientStats(layout_, Nc_);
    pending_count_ = 0;
    push_block(std::move(block));
}

void StatsReducer::push_block(SufficientStats block) {
    std::size_t level = 0;
    for (;; ++level) {
        if (level == stack_.size()) stack_.emplace_back();
        if (!stack_[level]) {
            stack_[level] = std::move(block);
            return;
        }
        block = SufficientStats::merge(*stack_[level], block);
        stack_[level].reset();
    }
}

void StatsReducer::set_tail(SufficientStats partial, std::size_t experiments) {
    if (pending_count_ != 0 || experiments == 0 || experiments >= kReductionBlock)
        throw InvalidArgument("set_tail: reducer already has a pending block");
    pending_ = std::move(partial);
    pending_count_ = experiments;
}

SufficientStats StatsReducer::result() const {
    std::optional<SufficientStats> acc;
    if (pending_count_ > 0) acc = pending_;
    for (const auto& slot : stack_) {
        if (!slot) continue;
        acc = acc ? SufficientStats::merge(*slot, *acc) : *slot;
    }
    return acc ? *acc : SufficientStats(layout_, Nc_);
}

SufficientStats aggregate_range(const Dataset& ds, int L, std::size_t begin,
                                std::size_t end, unsigned workers) {
    ds.check();
    if (begin > end || end > ds.experiments.size())
        throw InvalidArgument("aggregate_range: bad range");
    if (L < 1 || ds.N < L) throw InvalidArgument("aggregate: need N >= L >= 1");
    const HankelLayout layout{ds.m, ds.p, L};
    const int Nc = ds.N - L + 1;
    const std::size_t count = end - begin;
    const std::size_t blocks = (count + kReductionBlock - 1) / kReductionBlock;

    std::vector<SufficientStats> block_stats(blocks);
    parallel_for(blocks, workers, [&](std::size_t b) {
        SufficientStats st(layout, Nc);
        const std::size_t lo = begin + b * kReductionBlock;
        const std::size_t hi = std::min(end, lo + kReductionBlock);
        for (std::size_t i = lo; i < hi; ++i)
            st.accumulate(stacked_hankel(ds.experiments[i], L));
        block_stats[b] = std::move(st);
    });

    StatsReducer reducer(layout, Nc);
    const std::size_t tail = count % kReductionBlock;
    for (std::size_t b = 0; b < blocks; ++b) {
        if (tail != 0 && b + 1 == blocks)
            reducer.set_tail(std::move(block_stats[b]), tail);
        else
            reducer.push_block(std::move(block_stats[b]));
    }
    return reducer.result();
}

SufficientStats aggregate(const Dataset& ds, int L, unsigned workers) {
    return aggregate_range(ds, L, 0, ds.experiments.size(), workers);
}

Matrix noiseless_M(const Dataset& ds, int L) {
    ds.check();
    const int d = (ds.m + ds.p) * L;
    Matrix M = Matrix::Zero(d, d);
    for (const auto& e : ds.experiments) {
        const Matrix H = stacked_hankel(e, L).matrix;
        M.noalias() += H * H.transpose();
    }
    return M / static_cast<double>(ds.Nt());
}

}  // namespace hankelinv
