#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace tecgp {

/// Seedable random source with a fixed, portable output sequence.
///
/// The engine is std::mt19937_64, whose output sequence is fully specified by
/// the C++ standard. The standard distributions are not (their algorithms are
/// implementation-defined), so every distribution used by the library is
/// implemented here on top of the raw 64-bit draws. Two runs with the same
/// seed produce the same numbers on any conforming platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
        : engine_(mix(seed, stream)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_index(std::uint64_t n) {
        // Rejection sampling removes the modulo bias.
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        std::uint64_t draw = engine_();
        while (draw >= limit) {
            draw = engine_();
        }
        return draw % n;
    }

    /// Uniform real in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    bool bernoulli(double p) { return uniform01() < p; }

    /// Standard normal draw (Box-Muller, one value per call).
    double normal() {
        double u1 = uniform01();
        while (u1 <= 0.0) {
            u1 = uniform01();
        }
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    // SplitMix64 finalizer over (seed, stream) so neighbouring seeds and
    // streams start from decorrelated engine states.
    static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

/// Fisher-Yates shuffle driven by Rng::uniform_index.
template <typename Range>
void shuffle(Range& range, Rng& rng) {
    using std::swap;
    const auto n = static_cast<std::uint64_t>(std::size(range));
    for (std::uint64_t i = n; i > 1; --i) {
        const auto j = rng.uniform_index(i);
        swap(range[i - 1], range[j]);
    }
}

}  // namespace tecgp
