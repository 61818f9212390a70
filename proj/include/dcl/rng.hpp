#pragma once

#include <cmath>
#include <cstdint>

#include "dcl/common.hpp"

// Counter-based random numbers. Every draw is a pure function of (seed, counter),
// so parallel samplers stay bit-identical no matter how work is split.

namespace dcl {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) {
    return splitmix64(seed ^ (0x9e3779b97f4a7c15ULL + value));
}

/// Uniform double in [0, 1) from a (seed, counter) pair.
inline double uniform01(std::uint64_t seed, std::uint64_t counter) {
    return double(hash_combine(seed, counter) >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller; consumes two counters (2*counter, 2*counter+1).
/// Self-contained so outputs do not depend on the C++ library's distribution code.
inline double gaussian(std::uint64_t seed, std::uint64_t counter) {
    double u1 = uniform01(seed, 2 * counter);
    double u2 = uniform01(seed, 2 * counter + 1);
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace dcl
