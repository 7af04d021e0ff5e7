#include "polybill/billiard.hpp"

#include <cmath>
#include <limits>

#include "polybill/ray.hpp"

namespace polybill {

RayHit cast_ray(const Polygon& poly, Vec2 origin, Vec2 dir, int exclude_edge) {
    RayHit best;
    double best_t = std::numeric_limits<double>::infinity();
    const int n = poly.size();
    const double scale = std::max(1.0, poly.diameter());
    for (int j = 0; j < n; ++j) {
        if (j == exclude_edge) continue;
        Vec2 q = poly.vertex(j);
        Vec2 e = poly.vertex(j + 1) - q;
        double denom = cross(dir, e);
        if (std::abs(denom) <= 1e-15 * poly.edge_length(j)) continue;
        Vec2 qp = q - origin;
        double t = cross(qp, e) / denom;
        double w = cross(qp, dir) / denom;
        if (t <= kGeomTol * scale) continue;
        double len = poly.edge_length(j);
        if (w * len < -kGeomTol * scale || w * len > len + kGeomTol * scale) continue;
        if (t < best_t) {
            best_t = t;
            best.edge = j;
            best.t = t;
            best.local = std::clamp(w, 0.0, 1.0) * len;
        }
    }
    if (best.edge < 0) {
        best.status = RayStatus::Miss;
        return best;
    }
    double len = poly.edge_length(best.edge);
    if (best.local <= kGeomTol * scale || len - best.local <= kGeomTol * scale) {
        best.status = RayStatus::Vertex;
        return best;
    }
    double c = dot(dir, poly.inward_normal(best.edge));
    if (std::abs(c) <= kGeomTol) {
        best.status = RayStatus::Tangent;
        return best;
    }
    best.status = RayStatus::Ok;
    return best;
}

Vec2 velocity(const Polygon& poly, int edge, double theta) {
    return std::sin(theta) * poly.tangent(edge) + std::cos(theta) * poly.inward_normal(edge);
}

double angle_after(const Polygon& poly, int edge_from, int edge_to, double theta) {
    return kPi - delta_angle(poly, edge_from, edge_to) - theta;
}

FlightOutcome flight(const Polygon& poly, PhasePoint x) {
    if (!(std::abs(x.theta) < 0.5 * kPi - kGeomTol)) return Singular{SingularKind::TangentRay};
    BoundaryPoint bp = poly.point_at(x.s);
    double local = x.s - poly.vertex_arclength(bp.edge);
    double scale = std::max(1.0, poly.diameter());
    if (bp.at_vertex || poly.edge_length(bp.edge) - local <= kGeomTol * scale) return Singular{SingularKind::HitVertex};
    Vec2 v = velocity(poly, bp.edge, x.theta);
    RayHit hit = cast_ray(poly, bp.point, v, bp.edge);
    switch (hit.status) {
        case RayStatus::Vertex:
        case RayStatus::Miss: return Singular{SingularKind::HitVertex};
        case RayStatus::Tangent: return Singular{SingularKind::TangentRay};
        case RayStatus::Ok: break;
    }
    Flight fl;
    fl.edge_from = bp.edge;
    fl.edge_to = hit.edge;
    fl.t = hit.t;
    fl.s1 = poly.vertex_arclength(hit.edge) + hit.local;
    fl.theta_bar = std::atan2(dot(poly.tangent(hit.edge), v), -dot(poly.inward_normal(hit.edge), v));
    return fl;
}

StepOutcome step(const Polygon& poly, const ReflectionLaw& f, PhasePoint x) {
    FlightOutcome fo = flight(poly, x);
    if (auto* sg = std::get_if<Singular>(&fo)) return *sg;
    const Flight& fl = std::get<Flight>(fo);
    return Step{PhasePoint{fl.s1, f(fl.theta_bar)}, fl};
}

std::optional<PhasePoint> inverse_step(const Polygon& poly, const ReflectionLaw& f, PhasePoint y) {
    double theta_bar = f.inverse(y.theta);
    if (!std::isfinite(theta_bar) || !(std::abs(theta_bar) < 0.5 * kPi - kGeomTol)) return std::nullopt;
    BoundaryPoint bp = poly.point_at(y.s);
    double local = y.s - poly.vertex_arclength(bp.edge);
    double scale = std::max(1.0, poly.diameter());
    if (bp.at_vertex || poly.edge_length(bp.edge) - local <= kGeomTol * scale) return std::nullopt;
    // Incoming velocity is the mirror image of the outgoing specular direction.
    Vec2 back = -std::sin(theta_bar) * poly.tangent(bp.edge) + std::cos(theta_bar) * poly.inward_normal(bp.edge);
    RayHit hit = cast_ray(poly, bp.point, back, bp.edge);
    if (hit.status != RayStatus::Ok) return std::nullopt;
    Vec2 v = -1.0 * back;
    double theta0 = std::atan2(dot(v, poly.tangent(hit.edge)), dot(v, poly.inward_normal(hit.edge)));
    return PhasePoint{poly.vertex_arclength(hit.edge) + hit.local, theta0};
}

Mat2 derivative(const ReflectionLaw& f, PhasePoint x, const Flight& fl) {
    double cb = std::cos(fl.theta_bar);
    return {-std::cos(x.theta) / cb, -fl.t / cb, 0.0, -f.derivative(fl.theta_bar)};
}

double jacobian(const Polygon& poly, const ReflectionLaw& f, PhasePoint x) {
    FlightOutcome fo = flight(poly, x);
    if (std::holds_alternative<Singular>(fo)) return std::nan("");
    const Flight& fl = std::get<Flight>(fo);
    return std::abs(std::cos(x.theta) / std::cos(fl.theta_bar)) * std::abs(f.derivative(fl.theta_bar));
}

double Cocycle::alpha() const { return std::exp(log_alpha); }
double Cocycle::beta() const { return beta_sign == 0 ? 0.0 : beta_sign * std::exp(log_abs_beta); }
double Cocycle::gamma() const { return gamma_over_alpha * alpha(); }
double Cocycle::Lambda() const { return std::exp(log_Lambda); }

Mat2 Cocycle::matrix() const {
    double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    return {sgn * alpha(), sgn * gamma(), 0.0, sgn * beta()};
}

Orbit iterate(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int n, bool record_cocycle) {
    Orbit orb;
    orb.points.reserve(n + 1);
    orb.flights.reserve(n);
    orb.points.push_back(x0);
    Cocycle cc;
    if (record_cocycle) orb.cocycles.push_back(cc);
    PhasePoint x = x0;
    for (int i = 0; i < n; ++i) {
        StepOutcome so = step(poly, f, x);
        if (auto* sg = std::get_if<Singular>(&so)) {
            orb.termination = *sg;
            break;
        }
        const Step& st = std::get<Step>(so);
        if (record_cocycle) {
            double cb = std::cos(st.flight.theta_bar);
            double ratio_beta_alpha = cc.beta_sign == 0 ? 0.0 : cc.beta_sign * std::exp(cc.log_abs_beta - cc.log_alpha);
            cc.gamma_over_alpha += st.flight.t / std::cos(x.theta) * ratio_beta_alpha;
            cc.log_alpha += std::log(std::cos(x.theta)) - std::log(cb);
            double df = f.derivative(st.flight.theta_bar);
            if (df == 0.0) {
                cc.beta_sign = 0;
                cc.log_abs_beta = -std::numeric_limits<double>::infinity();
            } else {
                cc.log_abs_beta += std::log(std::abs(df));
                if (df < 0.0) cc.beta_sign = -cc.beta_sign;
            }
            cc.log_Lambda += std::log(rho(f, st.flight.theta_bar));
            cc.n = i + 1;
            orb.cocycles.push_back(cc);
        }
        orb.flights.push_back(st.flight);
        orb.points.push_back(st.next);
        x = st.next;
    }
    return orb;
}

}  // namespace polybill
