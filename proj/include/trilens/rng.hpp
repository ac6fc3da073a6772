/// @file  rng.hpp
/// @brief Seeded random number generation.
///
/// All randomized operations in the library run on SplitMix64, a
/// counter-based generator: output i of a stream seeded with s is
/// mix64(s + (i+1)*GAMMA). Integer draws are exact on every platform;
/// floating-point draws additionally depend only on IEEE-754 double
/// arithmetic (Gaussian variates go through libm, so they are identical
/// across runs on one platform and equal up to libm rounding elsewhere).
/// Independent child streams are derived with derive_seed(seed, index).

#pragma once

#include <cmath>
#include <cstdint>

namespace trilens {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ULL;

/// One SplitMix64 mixing round (Stafford variant 13).
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

/// Deterministic child-stream seed: mix64(seed XOR mix64(index+GAMMA)).
/// Used for per-repetition, per-worker and per-object streams.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return mix64(seed ^ mix64(index + kSplitMixGamma));
}

class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += kSplitMixGamma;
        return mix64(state_);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). Unbiased via rejection; bound > 0.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t v = next();
            if (v >= threshold) return v % bound;
        }
    }

    /// Standard normal variate (Box-Muller, pairs cached).
    double next_gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = next_double();
        while (u <= 0.0) u = next_double();
        const double v = next_double();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double a = 6.283185307179586476925286766559 * v;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace trilens
