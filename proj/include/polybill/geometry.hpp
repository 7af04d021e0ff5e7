#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace polybill {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kGeomTol = 1e-12;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double k, Vec2 a) { return {k * a.x, k * a.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
// Rotation by +pi/2.
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

enum class GeometryErrorKind { TooFewVertices, DegenerateEdge, SelfIntersecting, OutOfRange, SameEdge, NotATriangle };

class GeometryError : public std::invalid_argument {
public:
    GeometryError(GeometryErrorKind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
    GeometryErrorKind kind() const { return kind_; }

private:
    GeometryErrorKind kind_;
};

struct BoundaryPoint {
    Vec2 point;
    int edge = 0;
    bool at_vertex = false;
};

// Simple polygon stored counterclockwise. Edge i runs from vertex i to vertex i+1,
// and the boundary is parametrized by arclength starting at vertex 0.
class Polygon {
public:
    // Validates the input; clockwise input is reversed and flagged.
    explicit Polygon(std::vector<Vec2> vertices);

    int size() const { return static_cast<int>(vertices_.size()); }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    Vec2 vertex(int i) const { return vertices_[wrap(i)]; }
    bool was_reversed() const { return reversed_; }

    double perimeter() const { return cumulative_.back(); }
    double edge_length(int i) const { return lengths_[wrap(i)]; }
    // Arclength of vertex i.
    double vertex_arclength(int i) const { return cumulative_[wrap(i)]; }
    Vec2 tangent(int i) const { return tangents_[wrap(i)]; }
    Vec2 inward_normal(int i) const { return perp(tangents_[wrap(i)]); }
    double edge_direction(int i) const { return std::atan2(tangents_[wrap(i)].y, tangents_[wrap(i)].x); }

    // Edge containing arclength s; vertices belong to the edge they start.
    int edge_at(double s) const;
    BoundaryPoint point_at(double s) const;
    // Arclength of a point known to lie on edge i.
    double arclength_on_edge(int i, Vec2 p) const;

    double interior_angle(int i) const;
    double diameter() const { return diameter_; }
    bool is_convex() const;
    bool contains(Vec2 p) const;
    // True when the open segment (a, b) lies in the interior of the polygon.
    bool segment_inside(Vec2 a, Vec2 b) const;

    int wrap(int i) const {
        int n = size();
        return ((i % n) + n) % n;
    }

private:
    std::vector<Vec2> vertices_;
    std::vector<double> lengths_;
    std::vector<double> cumulative_;
    std::vector<Vec2> tangents_;
    double diameter_ = 0.0;
    bool reversed_ = false;
};

Polygon regular_polygon(int d, double side = 1.0);
// Rectangle with sides of length 1 along the x-axis and height h.
Polygon rectangle(double h);

// Counterclockwise angle from the direction of side i to the direction of side j, in (0, 2pi].
double delta_angle(const Polygon& poly, int i, int j);
bool parallel_edges(const Polygon& poly, int i, int j, double tol = 1e-9);
bool sides_see_each_other(const Polygon& poly, int i, int j);
// Two antiparallel sides joined by a segment orthogonal to both that lies inside the polygon.
bool has_parallel_facing(const Polygon& poly);

}  // namespace polybill
