#include "polybill/geometry.hpp"

#include <algorithm>
#include <limits>

namespace polybill {

namespace {

double signed_area(const std::vector<Vec2>& v) {
    double a = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const Vec2& p = v[i];
        const Vec2& q = v[(i + 1) % v.size()];
        a += cross(p, q);
    }
    return 0.5 * a;
}

int orientation(Vec2 a, Vec2 b, Vec2 c, double tol) {
    double v = cross(b - a, c - a);
    if (v > tol) return 1;
    if (v < -tol) return -1;
    return 0;
}

bool on_segment(Vec2 a, Vec2 b, Vec2 p, double tol) {
    return std::min(a.x, b.x) - tol <= p.x && p.x <= std::max(a.x, b.x) + tol &&
           std::min(a.y, b.y) - tol <= p.y && p.y <= std::max(a.y, b.y) + tol;
}

bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    int o1 = orientation(a, b, c, tol);
    int o2 = orientation(a, b, d, tol);
    int o3 = orientation(c, d, a, tol);
    int o4 = orientation(c, d, b, tol);
    if (o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0) {
        if (o1 != 0 || o2 != 0) return true;
    }
    if (o1 == 0 && on_segment(a, b, c, tol)) return true;
    if (o2 == 0 && on_segment(a, b, d, tol)) return true;
    if (o3 == 0 && on_segment(c, d, a, tol)) return true;
    if (o4 == 0 && on_segment(c, d, b, tol)) return true;
    return false;
}

}  // namespace

Polygon::Polygon(std::vector<Vec2> vertices) : vertices_(std::move(vertices)) {
    const int n = size();
    if (n < 3) throw GeometryError(GeometryErrorKind::TooFewVertices, "polygon needs at least 3 vertices");
    double scale = 0.0;
    for (const auto& v : vertices_) {
        if (!std::isfinite(v.x) || !std::isfinite(v.y))
            throw GeometryError(GeometryErrorKind::DegenerateEdge, "non-finite vertex coordinate");
        scale = std::max({scale, std::abs(v.x), std::abs(v.y)});
    }
    const double tol = kGeomTol * std::max(1.0, scale);
    for (int i = 0; i < n; ++i) {
        if (norm(vertices_[(i + 1) % n] - vertices_[i]) <= tol)
            throw GeometryError(GeometryErrorKind::DegenerateEdge, "edge " + std::to_string(i) + " has zero length");
    }
    if (signed_area(vertices_) < 0.0) {
        std::reverse(vertices_.begin(), vertices_.end());
        std::rotate(vertices_.begin(), vertices_.end() - 1, vertices_.end());
        reversed_ = true;
    }
    for (int i = 0; i < n; ++i) {
        Vec2 a = vertices_[i], b = vertices_[(i + 1) % n];
        for (int j = i + 1; j < n; ++j) {
            Vec2 c = vertices_[j], d = vertices_[(j + 1) % n];
            bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges may only share their common vertex.
                Vec2 shared = (j == i + 1) ? b : a;
                Vec2 p = (j == i + 1) ? a : b;
                Vec2 q = (j == i + 1) ? d : c;
                if (orientation(p, shared, q, tol) == 0 && dot(p - shared, q - shared) > 0.0)
                    throw GeometryError(GeometryErrorKind::SelfIntersecting, "adjacent edges fold back");
                continue;
            }
            if (segments_intersect(a, b, c, d, tol))
                throw GeometryError(GeometryErrorKind::SelfIntersecting,
                                    "edges " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
        }
    }
    lengths_.resize(n);
    tangents_.resize(n);
    cumulative_.assign(n + 1, 0.0);
    for (int i = 0; i < n; ++i) {
        Vec2 e = vertices_[(i + 1) % n] - vertices_[i];
        lengths_[i] = norm(e);
        tangents_[i] = (1.0 / lengths_[i]) * e;
        cumulative_[i + 1] = cumulative_[i] + lengths_[i];
    }
    for (const auto& a : vertices_)
        for (const auto& b : vertices_) diameter_ = std::max(diameter_, norm(a - b));
}

int Polygon::edge_at(double s) const {
    if (!(s >= 0.0) || s > perimeter()) throw GeometryError(GeometryErrorKind::OutOfRange, "arclength outside [0, perimeter]");
    if (s == perimeter()) return 0;
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    int e = static_cast<int>(it - cumulative_.begin()) - 1;
    return std::clamp(e, 0, size() - 1);
}

BoundaryPoint Polygon::point_at(double s) const {
    int e = edge_at(s);
    double local = (s == perimeter()) ? 0.0 : s - cumulative_[e];
    BoundaryPoint bp;
    bp.edge = e;
    bp.point = vertices_[e] + local * tangents_[e];
    bp.at_vertex = local <= kGeomTol * std::max(1.0, perimeter());
    return bp;
}

double Polygon::arclength_on_edge(int i, Vec2 p) const {
    i = wrap(i);
    double local = std::clamp(dot(p - vertices_[i], tangents_[i]), 0.0, lengths_[i]);
    return cumulative_[i] + local;
}

double Polygon::interior_angle(int i) const {
    // Angle at vertex i between the incoming edge i-1 and the outgoing edge i.
    Vec2 a = -1.0 * tangents_[wrap(i - 1)];
    Vec2 b = tangents_[wrap(i)];
    double ang = std::atan2(cross(b, a), dot(b, a));
    if (ang <= 0.0) ang += 2.0 * kPi;
    return ang;
}

bool Polygon::is_convex() const {
    for (int i = 0; i < size(); ++i)
        if (interior_angle(i) >= kPi - 1e-12) return false;
    return true;
}

bool Polygon::contains(Vec2 p) const {
    bool inside = false;
    const int n = size();
    for (int i = 0, j = n - 1; i < n; j = i++) {
        const Vec2& a = vertices_[i];
        const Vec2& b = vertices_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool Polygon::segment_inside(Vec2 a, Vec2 b) const {
    Vec2 r = b - a;
    double len = norm(r);
    if (len <= kGeomTol) return false;
    const double ttol = 1e-10;
    for (int i = 0; i < size(); ++i) {
        Vec2 q = vertices_[i];
        Vec2 s = vertices_[wrap(i + 1)] - q;
        double denom = cross(r, s);
        Vec2 qp = q - a;
        if (std::abs(denom) <= 1e-14 * len * lengths_[i]) {
            if (std::abs(cross(qp, r)) <= 1e-12 * len * std::max(1.0, norm(qp))) {
                // Collinear: any overlap of open intervals blocks.
                double t0 = dot(qp, r) / (len * len);
                double t1 = dot(qp + s, r) / (len * len);
                double lo = std::max(std::min(t0, t1), 0.0);
                double hi = std::min(std::max(t0, t1), 1.0);
                if (hi - lo > ttol) return false;
            }
            continue;
        }
        double t = cross(qp, s) / denom;
        double u = cross(qp, r) / denom;
        if (t > ttol && t < 1.0 - ttol && u >= -ttol && u <= 1.0 + ttol) return false;
    }
    return contains(a + 0.5 * r);
}

Polygon regular_polygon(int d, double side) {
    if (d < 3) throw GeometryError(GeometryErrorKind::TooFewVertices, "regular polygon needs d >= 3");
    std::vector<Vec2> v;
    Vec2 p{0.0, 0.0};
    for (int k = 0; k < d; ++k) {
        v.push_back(p);
        double a = 2.0 * kPi * k / d;
        // Exact zeros keep axis-aligned sides exact (the square in particular).
        double c = std::cos(a), s = std::sin(a);
        if (std::abs(c) < 1e-15) c = 0.0;
        if (std::abs(s) < 1e-15) s = 0.0;
        p = p + side * Vec2{c, s};
    }
    return Polygon(v);
}

Polygon rectangle(double h) {
    if (!(h > 0.0)) throw GeometryError(GeometryErrorKind::DegenerateEdge, "rectangle height must be positive");
    return Polygon({{0.0, 0.0}, {1.0, 0.0}, {1.0, h}, {0.0, h}});
}

double delta_angle(const Polygon& poly, int i, int j) {
    double d = poly.edge_direction(j) - poly.edge_direction(i);
    while (d <= 1e-13) d += 2.0 * kPi;
    while (d > 2.0 * kPi + 1e-13) d -= 2.0 * kPi;
    return d;
}

bool parallel_edges(const Polygon& poly, int i, int j, double tol) {
    return std::abs(cross(poly.tangent(i), poly.tangent(j))) <= tol;
}

bool sides_see_each_other(const Polygon& poly, int i, int j) {
    i = poly.wrap(i);
    j = poly.wrap(j);
    if (i == j) throw GeometryError(GeometryErrorKind::SameEdge, "a side cannot see itself");
    const int k = 48;
    Vec2 a0 = poly.vertex(i), a1 = poly.vertex(i + 1);
    Vec2 b0 = poly.vertex(j), b1 = poly.vertex(j + 1);
    for (int p = 0; p < k; ++p) {
        Vec2 a = a0 + ((p + 0.5) / k) * (a1 - a0);
        for (int q = 0; q < k; ++q) {
            Vec2 b = b0 + ((q + 0.5) / k) * (b1 - b0);
            if (poly.segment_inside(a, b)) return true;
        }
    }
    return false;
}

bool has_parallel_facing(const Polygon& poly) {
    const int n = poly.size();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j || !parallel_edges(poly, i, j) || dot(poly.tangent(i), poly.tangent(j)) > 0.0) continue;
            Vec2 origin = poly.vertex(i);
            Vec2 u = poly.tangent(i);
            Vec2 nrm = poly.inward_normal(i);
            double a = dot(poly.vertex(j) - origin, u);
            double b = dot(poly.vertex(j + 1) - origin, u);
            double lo = std::max(std::min(a, b), 0.0);
            double hi = std::min(std::max(a, b), poly.edge_length(i));
            if (hi - lo <= kGeomTol) continue;
            double sep = dot(poly.vertex(j) - origin, nrm);
            if (sep <= kGeomTol) continue;
            std::vector<double> cuts{lo, hi};
            for (const auto& v : poly.vertices()) {
                double c = dot(v - origin, u);
                if (c > lo && c < hi) cuts.push_back(c);
            }
            std::sort(cuts.begin(), cuts.end());
            for (size_t c = 0; c + 1 < cuts.size(); ++c) {
                if (cuts[c + 1] - cuts[c] <= kGeomTol) continue;
                Vec2 p = origin + (0.5 * (cuts[c] + cuts[c + 1])) * u;
                if (poly.segment_inside(p, p + sep * nrm)) return true;
            }
        }
    }
    return false;
}

}  // namespace polybill
