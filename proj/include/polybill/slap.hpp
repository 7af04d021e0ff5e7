#pragma once

#include <variant>
#include <vector>

#include "polybill/billiard.hpp"

namespace polybill {

// One step of the slap map: follow the inward normal from s to the next boundary point.
std::variant<double, Singular> slap_step(const Polygon& poly, double s);

enum class SlapTermination { Completed, HitVertex, FixedAtAcuteVertex };

struct SlapOrbit {
    std::vector<double> points;
    std::vector<int> edges;
    SlapTermination termination = SlapTermination::Completed;
};

// Orbit of s0 under the slap map. Starting exactly at a vertex with an acute interior
// angle gives FixedAtAcuteVertex.
SlapOrbit slap_orbit(const Polygon& poly, double s0, int n);

// Angle in (-pi/2, pi/2] between the supporting lines of sides i and j.
double line_angle(const Polygon& poly, int i, int j);

// min |cos phi|^{-1} over pairs of sides that see each other; +inf when no pair qualifies.
double slap_expansion(const Polygon& poly);

struct VertexConnection {
    int from = 0;               // vertex the slap orbit starts at
    int to = 0;                 // vertex it runs into
    std::vector<int> itinerary;  // edges whose normals are followed, in order
    int order = 0;
    bool certified = false;
};

struct VertexConnectionReport {
    int searched_order = 0;
    std::vector<VertexConnection> found;
    // Smallest distance from a traced point to a vertex it did not hit, relative to the diameter.
    double closest_miss = 0.0;
    // Double-precision hits rejected by the high-precision replay.
    int rejected = 0;
};

inline constexpr double kConnectionTol = 1e-9;

// Searches for orthogonal vertex connections of order <= m. Each connection is the
// reverse of a chain of orthogonal projections, so the search follows slap orbits
// that leave a vertex along the normal of one of its sides. Segments running along
// the boundary are allowed. With `certify`, every hit is replayed at 256-bit precision
// and kept only if it is confirmed there.
VertexConnectionReport find_vertex_connections(const Polygon& poly, int m, bool certify = true);

// Arclengths of edge-interior points whose normal ray runs straight into a vertex;
// the theta = 0 section of the forward singular set.
std::vector<double> slap_singular_points(const Polygon& poly);

// True when some image of a point of S (continued through the vertex it hits along
// either adjacent normal) lands on S again within k <= m steps.
bool slap_singular_self_hit(const Polygon& poly, int m);

}  // namespace polybill
