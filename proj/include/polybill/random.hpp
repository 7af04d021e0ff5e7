#pragma once

#include <cstdint>
#include <random>

#include "polybill/billiard.hpp"

namespace polybill {

// Independent stream for item `index` of a run seeded with `seed`.
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

// Uniform on [0, 1) from the top 53 bits; identical on every platform.
inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Lebesgue-random point of M: s uniform on the boundary, theta uniform on (-pi/2, pi/2).
inline PhasePoint random_phase_point(const Polygon& poly, std::mt19937_64& g) {
    double s = uniform01(g) * poly.perimeter();
    double theta = (uniform01(g) - 0.5) * kPi;
    return {s, theta};
}

}  // namespace polybill
