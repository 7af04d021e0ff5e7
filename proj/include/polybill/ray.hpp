#pragma once

#include "polybill/geometry.hpp"

namespace polybill {

enum class RayStatus { Ok, Vertex, Tangent, Miss };

struct RayHit {
    RayStatus status = RayStatus::Miss;
    int edge = -1;
    double t = 0.0;
    double local = 0.0;  // distance from the start vertex of the hit edge
};

// First boundary point hit by the ray origin + t*dir, t > 0, skipping one edge.
RayHit cast_ray(const Polygon& poly, Vec2 origin, Vec2 dir, int exclude_edge);

}  // namespace polybill
