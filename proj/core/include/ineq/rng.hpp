#pragma once

#include <cstdint>
#include <random>

namespace ineq {

/// SplitMix64 finalizer; used to derive independent sub-seeds such as
/// hash(seed, replicate index).
std::uint64_t mix64(std::uint64_t x) noexcept;
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Platform-stable random source.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The std:: distributions are implementation-defined, so every
/// transform used by the library lives here instead.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on (0, 1); safe for logs.
    double uniform_open() {
        double u;
        do {
            u = uniform();
        } while (u == 0.0);
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
    std::uint64_t below(std::uint64_t bound);

    bool bernoulli(double p) { return uniform() < p; }

    /// Standard normal via Marsaglia's polar method.
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }

    double lognormal(double meanlog, double sdlog);
    /// Pareto with minimum `scale` and tail exponent `shape`.
    double pareto(double scale, double shape);

    /// Index drawn from unnormalized probabilities.
    std::size_t categorical(const double* probs, std::size_t count);

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace ineq
