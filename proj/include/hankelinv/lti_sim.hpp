#pragma once

#include "hankelinv/common.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace hankelinv {

/// Discrete-time LTI realization
///   x_{k+1} = A x_k + B u_k,   y_k = C x_k + D u_k.
/// Only used to generate data and to build ground-truth oracles; the
/// estimator never sees it.
class StateSpace {
public:
    StateSpace(Matrix A, Matrix B, Matrix C, Matrix D);

    const Matrix& A() const noexcept { return A_; }
    const Matrix& B() const noexcept { return B_; }
    const Matrix& C() const noexcept { return C_; }
    const Matrix& D() const noexcept { return D_; }

    int n() const noexcept { return static_cast<int>(A_.rows()); }
    int m() const noexcept { return static_cast<int>(B_.cols()); }
    int p() const noexcept { return static_cast<int>(C_.rows()); }

    double spectral_radius() const;

private:
    Matrix A_, B_, C_, D_;
};

/// The 3-state, 2-input, 3-output benchmark system used throughout the
/// examples and acceptance suite.
StateSpace benchmark_system();

/// One input-output fragment. Rows are time samples.
struct Experiment {
    Matrix u;  // N x m
    Matrix y;  // N x p

    int length() const noexcept { return static_cast<int>(u.rows()); }
};

struct Dataset {
    std::vector<Experiment> experiments;
    int N = 0;
    int m = 0;
    int p = 0;

    int Nt() const noexcept { return static_cast<int>(experiments.size()); }

    /// Throws InvalidArgument unless Nt >= 1 and every experiment shares (N, m, p).
    void check() const;
};

enum class NoiseFamily { gaussian, uniform, shifted_exponential };

std::string to_string(NoiseFamily f);
NoiseFamily noise_family_from_string(const std::string& s);

/// i.i.d. scalar noise law, parameterized by its first two raw moments.
///
/// gaussian:            N(m1, m2 - m1^2)
/// uniform:             U[m1 - sqrt(3 var), m1 + sqrt(3 var)]
/// shifted_exponential: (m1 - s) + Exp(mean s), s = sqrt(var)
///
/// A zero variance is a point mass at m1 for every family.
class NoiseSpec {
public:
    NoiseSpec() = default;
    NoiseSpec(NoiseFamily family, double m1, double m2);

    static NoiseSpec none() { return {}; }

    NoiseFamily family() const noexcept { return family_; }
    double m1() const noexcept { return m1_; }
    double m2() const noexcept { return m2_; }
    double variance() const noexcept { return m2_ - m1_ * m1_; }

    double sample(Rng& rng) const;

private:
    NoiseFamily family_ = NoiseFamily::gaussian;
    double m1_ = 0.0;
    double m2_ = 0.0;
};

/// Exact state recursion from x0.
Experiment simulate(const StateSpace& ss, const Vector& x0, const Matrix& U);

using ScalarSampler = std::function<double(Rng&)>;

inline constexpr int kPeMaxAttempts = 10;

/// Draws an N x m input that is persistently exciting of `order`; i.i.d.
/// standard normal unless another sampler is supplied. Redraws up to
/// kPeMaxAttempts times.
Matrix generate_pe_input(int N, int m, int order, Rng& rng);
Matrix generate_pe_input(int N, int m, int order, Rng& rng,
                         const ScalarSampler& sampler);

struct InitialStatePolicy {
    enum class Kind { zero, random_bounded };
    Kind kind = Kind::random_bounded;
    double half_width = 1.0;
};

/// Nt noiseless experiments, each with its own PE input of order L+n and an
/// initial state drawn per `x0`. Experiment i only depends on (seed, i).
Dataset generate_dataset(const StateSpace& ss, int Nt, int N, int L,
                         const InitialStatePolicy& x0, std::uint64_t seed,
                         unsigned workers = 1);

/// Adds independent noise to every entry of u (spec_u) and y (spec_y).
Dataset add_noise(const Dataset& ds, const NoiseSpec& spec_u,
                  const NoiseSpec& spec_y, std::uint64_t seed,
                  unsigned workers = 1);

}  // namespace hankelinv
