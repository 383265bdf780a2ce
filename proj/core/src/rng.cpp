#include "ineq/rng.hpp"

#include <cmath>

namespace ineq {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x8bb84b93962eacc9ULL));
}

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound <= 1) return 0;
    u128 m = static_cast<u128>(engine_()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<u128>(engine_()) * bound;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

double Rng::lognormal(double meanlog, double sdlog) { return std::exp(normal(meanlog, sdlog)); }

double Rng::pareto(double scale, double shape) {
    return scale * std::pow(uniform_open(), -1.0 / shape);
}

std::size_t Rng::categorical(const double* probs, std::size_t count) {
    double total = 0.0;
    for (std::size_t i = 0; i < count; ++i) total += probs[i];
    double u = uniform() * total;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        if (u < probs[i]) return i;
        u -= probs[i];
    }
    return count == 0 ? 0 : count - 1;
}

}  // namespace ineq
