#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace hankelinv {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Rng = std::mt19937_64;

// Error categories. Each maps onto one failure mode callers are expected to
// distinguish; all derive from std::runtime_error or std::invalid_argument so
// generic handlers keep working.
struct InvalidArgument : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct InfeasibleRequest : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct GenerationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyEnsemble : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OracleFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Derives an independent stream seed from a root seed, a purpose tag and an
/// index (experiment number, seed replicate, ...).
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t tag,
                                    std::uint64_t index) noexcept {
    return mix64(mix64(mix64(root) ^ tag) + index);
}

namespace stream_tag {
inline constexpr std::uint64_t input = 0x1a2b'0001;
inline constexpr std::uint64_t initial_state = 0x1a2b'0002;
inline constexpr std::uint64_t input_noise = 0x1a2b'0003;
inline constexpr std::uint64_t output_noise = 0x1a2b'0004;
inline constexpr std::uint64_t replicate = 0x1a2b'0005;
inline constexpr std::uint64_t oracle = 0x1a2b'0006;
}  // namespace stream_tag

inline unsigned resolve_workers(unsigned workers) {
    if (workers != 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, count) on up to `workers` threads (0 = hardware
/// concurrency). Work is split into contiguous chunks; fn must only touch
/// state owned by index i.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
    const std::size_t threads =
        std::min<std::size_t>(resolve_workers(workers), count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            try {
                const std::size_t lo = t * chunk;
                const std::size_t hi = std::min(count, lo + chunk);
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace hankelinv
