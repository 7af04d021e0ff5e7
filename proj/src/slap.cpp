#include "polybill/slap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "polybill/ray.hpp"

namespace polybill {

namespace {

using Float256 = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256, boost::multiprecision::digit_base_2>>;

template <class T>
struct P2 {
    T x, y;
};

template <class T>
P2<T> to_p2(Vec2 v) {
    return {T(v.x), T(v.y)};
}

template <class T>
P2<T> unit_normal(const Polygon& poly, int edge) {
    P2<T> a = to_p2<T>(poly.vertex(edge));
    P2<T> b = to_p2<T>(poly.vertex(edge + 1));
    T dx = b.x - a.x, dy = b.y - a.y;
    T len = sqrt(dx * dx + dy * dy);
    return {-dy / len, dx / len};
}

// Replays a connection in type T and returns the distance from the target vertex to
// the last ray, relative to the diameter.
template <class T>
T replay_distance(const Polygon& poly, const VertexConnection& c) {
    P2<T> p = to_p2<T>(poly.vertex(c.from));
    for (std::size_t k = 0; k < c.itinerary.size(); ++k) {
        P2<T> d = unit_normal<T>(poly, c.itinerary[k]);
        if (k + 1 == c.itinerary.size()) break;
        int e = c.itinerary[k + 1];
        P2<T> q = to_p2<T>(poly.vertex(e));
        P2<T> r = to_p2<T>(poly.vertex(e + 1));
        T ex = r.x - q.x, ey = r.y - q.y;
        T denom = d.x * ey - d.y * ex;
        T t = ((q.x - p.x) * ey - (q.y - p.y) * ex) / denom;
        p = {p.x + t * d.x, p.y + t * d.y};
    }
    P2<T> d = unit_normal<T>(poly, c.itinerary.back());
    P2<T> v = to_p2<T>(poly.vertex(c.to));
    T dist = abs((v.x - p.x) * d.y - (v.y - p.y) * d.x);
    return dist / T(std::max(1.0, poly.diameter()));
}

struct Landing {
    enum Kind { Edge, Vertex, Blocked } kind = Blocked;
    int index = -1;  // edge or vertex
    Vec2 point;
    double miss = std::numeric_limits<double>::infinity();
};

// Angle of d measured counterclockwise from the direction of side `vertex`, in [0, 2pi).
double angle_from_side(const Polygon& poly, int vertex, Vec2 d) {
    Vec2 t = poly.tangent(vertex);
    double a = std::atan2(cross(t, d), dot(t, d));
    return a < 0.0 ? a + 2.0 * kPi : a;
}

// First boundary point along the ray from p in direction d. `on_vertex` >= 0 when p is
// that vertex; otherwise p lies inside edge `on_edge`.
Landing shoot(const Polygon& poly, Vec2 p, Vec2 d, int on_edge, int on_vertex) {
    const double scale = std::max(1.0, poly.diameter());
    const double tol = kConnectionTol * scale;
    Landing out;
    if (on_vertex >= 0) {
        double a = angle_from_side(poly, on_vertex, d);
        double interior = poly.interior_angle(on_vertex);
        if (std::abs(a - interior) < 1e-12) {
            // Runs along the incoming side back to its start vertex.
            out.kind = Landing::Vertex;
            out.index = poly.wrap(on_vertex - 1);
            out.point = poly.vertex(out.index);
            return out;
        }
        if (a < 1e-12) {
            out.kind = Landing::Vertex;
            out.index = poly.wrap(on_vertex + 1);
            out.point = poly.vertex(out.index);
            return out;
        }
        if (a > interior) return out;
    }
    double best_t = std::numeric_limits<double>::infinity();
    int best_edge = -1;
    double best_w = 0.0;
    for (int j = 0; j < poly.size(); ++j) {
        if (j == on_edge) continue;
        if (on_vertex >= 0 && (j == on_vertex || j == poly.wrap(on_vertex - 1))) continue;
        Vec2 q = poly.vertex(j);
        Vec2 e = poly.vertex(j + 1) - q;
        double denom = cross(d, e);
        if (std::abs(denom) <= 1e-15 * poly.edge_length(j)) continue;
        Vec2 qp = q - p;
        double t = cross(qp, e) / denom;
        double w = cross(qp, d) / denom;
        double len = poly.edge_length(j);
        if (t <= tol || w * len < -tol || w * len > len + tol) continue;
        if (t < best_t) {
            best_t = t;
            best_edge = j;
            best_w = w;
        }
    }
    if (best_edge < 0) return out;
    double len = poly.edge_length(best_edge);
    double local = best_w * len;
    out.point = p + best_t * d;
    if (local <= tol || len - local <= tol) {
        out.kind = Landing::Vertex;
        out.index = local <= tol ? best_edge : poly.wrap(best_edge + 1);
        out.point = poly.vertex(out.index);
        return out;
    }
    out.kind = Landing::Edge;
    out.index = best_edge;
    out.miss = std::min(local, len - local) / scale;
    return out;
}

}  // namespace

std::variant<double, Singular> slap_step(const Polygon& poly, double s) {
    FlightOutcome fo = flight(poly, PhasePoint{s, 0.0});
    if (auto* sg = std::get_if<Singular>(&fo)) return *sg;
    return std::get<Flight>(fo).s1;
}

SlapOrbit slap_orbit(const Polygon& poly, double s0, int n) {
    SlapOrbit orb;
    orb.points.push_back(s0);
    BoundaryPoint bp = poly.point_at(s0);
    orb.edges.push_back(bp.edge);
    double local = s0 - poly.vertex_arclength(bp.edge);
    if (bp.at_vertex || poly.edge_length(bp.edge) - local <= kGeomTol) {
        int v = bp.at_vertex ? bp.edge : poly.wrap(bp.edge + 1);
        orb.termination = poly.interior_angle(v) < 0.5 * kPi ? SlapTermination::FixedAtAcuteVertex : SlapTermination::HitVertex;
        return orb;
    }
    double s = s0;
    for (int k = 0; k < n; ++k) {
        auto r = slap_step(poly, s);
        if (std::holds_alternative<Singular>(r)) {
            orb.termination = SlapTermination::HitVertex;
            return orb;
        }
        s = std::get<double>(r);
        orb.points.push_back(s);
        orb.edges.push_back(poly.edge_at(s));
    }
    return orb;
}

double line_angle(const Polygon& poly, int i, int j) {
    double phi = delta_angle(poly, i, j) - kPi;
    while (phi > 0.5 * kPi + 1e-15) phi -= kPi;
    while (phi <= -0.5 * kPi + 1e-15) phi += kPi;
    if (parallel_edges(poly, i, j)) phi = 0.0;
    return phi;
}

double slap_expansion(const Polygon& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < poly.size(); ++i)
        for (int j = i + 1; j < poly.size(); ++j) {
            if (!sides_see_each_other(poly, i, j)) continue;
            best = std::min(best, 1.0 / std::abs(std::cos(line_angle(poly, i, j))));
        }
    return best;
}

VertexConnectionReport find_vertex_connections(const Polygon& poly, int m, bool certify) {
    VertexConnectionReport rep;
    rep.searched_order = m;
    rep.closest_miss = std::numeric_limits<double>::infinity();
    for (int v = 0; v < poly.size(); ++v) {
        for (int first : {poly.wrap(v - 1), v}) {
            Vec2 p = poly.vertex(v);
            int edge = first;
            int at_vertex = v;
            std::vector<int> itinerary;
            for (int k = 0; k < m; ++k) {
                itinerary.push_back(edge);
                Landing l = shoot(poly, p, poly.inward_normal(edge), at_vertex >= 0 ? -1 : edge, at_vertex);
                if (l.kind == Landing::Blocked) break;
                if (l.kind == Landing::Vertex) {
                    VertexConnection c;
                    c.from = v;
                    c.to = l.index;
                    c.itinerary = itinerary;
                    c.order = static_cast<int>(itinerary.size());
                    if (certify) {
                        c.certified = replay_distance<Float256>(poly, c) < Float256(1e-40);
                        if (!c.certified) {
                            ++rep.rejected;
                            break;
                        }
                    }
                    rep.found.push_back(c);
                    break;
                }
                rep.closest_miss = std::min(rep.closest_miss, l.miss);
                p = l.point;
                edge = l.index;
                at_vertex = -1;
            }
        }
    }
    return rep;
}

std::vector<double> slap_singular_points(const Polygon& poly) {
    std::vector<double> out;
    const double scale = std::max(1.0, poly.diameter());
    for (int i = 0; i < poly.size(); ++i) {
        Vec2 a = poly.vertex(i);
        Vec2 t = poly.tangent(i);
        Vec2 n = poly.inward_normal(i);
        double len = poly.edge_length(i);
        for (int j = 0; j < poly.size(); ++j) {
            if (j == i || j == poly.wrap(i + 1)) continue;
            Vec2 v = poly.vertex(j);
            double local = dot(v - a, t);
            if (local <= kConnectionTol * scale || local >= len - kConnectionTol * scale) continue;
            if (dot(v - a, n) <= 0.0) continue;
            Vec2 foot = a + local * t;
            RayHit hit = cast_ray(poly, foot, n, i);
            if (hit.status != RayStatus::Vertex) continue;
            Vec2 hp = poly.vertex(hit.edge) + hit.local * poly.tangent(hit.edge);
            if (norm(hp - v) > 1e-9 * scale) continue;
            out.push_back(poly.vertex_arclength(i) + local);
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(), [&](double x, double y) { return std::abs(x - y) < 1e-12 * scale; }), out.end());
    return out;
}

bool slap_singular_self_hit(const Polygon& poly, int m) {
    std::vector<double> S = slap_singular_points(poly);
    if (S.empty()) return false;
    const double tol = kConnectionTol * std::max(1.0, poly.perimeter());
    auto in_S = [&](double s) {
        auto it = std::lower_bound(S.begin(), S.end(), s - tol);
        return it != S.end() && *it <= s + tol;
    };
    for (double s0 : S) {
        BoundaryPoint bp = poly.point_at(s0);
        RayHit hit = cast_ray(poly, bp.point, poly.inward_normal(bp.edge), bp.edge);
        int v = hit.local < 0.5 * poly.edge_length(hit.edge) ? hit.edge : poly.wrap(hit.edge + 1);
        for (int first : {poly.wrap(v - 1), v}) {
            Vec2 d = poly.inward_normal(first);
            double a = angle_from_side(poly, v, d);
            if (a <= 1e-12 || a >= poly.interior_angle(v) - 1e-12) continue;
            RayHit h = cast_ray(poly, poly.vertex(v) + 1e-12 * d, d, first);
            if (h.status != RayStatus::Ok) continue;
            double s = poly.vertex_arclength(h.edge) + h.local;
            for (int k = 1; k <= m; ++k) {
                if (in_S(s)) return true;
                auto r = slap_step(poly, s);
                if (std::holds_alternative<Singular>(r)) break;
                s = std::get<double>(r);
            }
        }
    }
    return false;
}

}  // namespace polybill
