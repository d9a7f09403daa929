#pragma once

#include <cstdint>

namespace reachcloud {

/// Counter-based uniform generator. Every draw is a pure function of
/// (seed, counter), so parallel workers produce identical streams no matter
/// how the work is partitioned.
namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::uint64_t at(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ull);
}

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(at(seed, counter) >> 11) * 0x1.0p-53;
}

/// Uniform double in [lo, hi].
inline double uniform_in(std::uint64_t seed, std::uint64_t counter, double lo, double hi) {
    return lo + uniform(seed, counter) * (hi - lo);
}

}  // namespace rng
}  // namespace reachcloud
