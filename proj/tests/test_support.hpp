#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <variant>

#include "polybill/billiard.hpp"

namespace testing_support {

using namespace polybill;

inline Polygon equilateral() { return regular_polygon(3); }
inline Polygon square() { return regular_polygon(4); }
inline Polygon pentagon() { return regular_polygon(5); }

// Room with two deep slots in the floor; the slot bottoms cannot see each other.
inline Polygon slotted_room() {
    return Polygon({{0, 0}, {2, 0}, {2, -5}, {3, -5}, {3, 0}, {7, 0}, {7, -5}, {8, -5}, {8, 0}, {10, 0}, {10, 5}, {0, 5}});
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform(double a, double b) { return a + (b - a) * ((gen_() >> 11) * 0x1.0p-53); }
    int integer(int lo, int hi) { return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1)); }

private:
    std::mt19937_64 gen_;
};

inline PhasePoint random_point(const Polygon& poly, Rng& rng, double max_theta = 1.4) {
    int e = rng.integer(0, poly.size() - 1);
    double s = poly.vertex_arclength(e) + poly.edge_length(e) * rng.uniform(0.02, 0.98);
    return {s, rng.uniform(-max_theta, max_theta)};
}

inline double boundary_distance(const Polygon& poly, Vec2 p) {
    double best = 1e300;
    for (int i = 0; i < poly.size(); ++i) {
        Vec2 a = poly.vertex(i), b = poly.vertex(i + 1);
        double t = std::clamp(dot(p - a, b - a) / dot(b - a, b - a), 0.0, 1.0);
        best = std::min(best, norm(p - (a + t * (b - a))));
    }
    return best;
}

// Independent check that the open segment stays in the interior: sample it densely.
inline bool segment_inside_sampled(const Polygon& poly, Vec2 a, Vec2 b, int samples = 400) {
    for (int i = 1; i < samples; ++i) {
        Vec2 p = a + (static_cast<double>(i) / samples) * (b - a);
        if (!poly.contains(p) || boundary_distance(poly, p) < 1e-9) return false;
    }
    return true;
}

inline bool is_regular(const StepOutcome& o) { return std::holds_alternative<Step>(o); }

}  // namespace testing_support
