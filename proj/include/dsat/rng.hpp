#pragma once

#include <cstdint>
#include <random>

namespace dsat {

// All randomness in the project flows through std::mt19937_64 (its output
// sequence is fixed by the standard) and the helpers below. The standard
// distributions are avoided on purpose because their algorithms are
// implementation-defined, which would break cross-build reproducibility.
using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Used to derive seeds; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline Rng make_rng(std::uint64_t seed) { return Rng{mix64(seed)}; }

/// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t r = rng();
        if (r >= threshold) return r % bound;
    }
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace dsat
