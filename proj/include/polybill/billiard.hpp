#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "polybill/geometry.hpp"
#include "polybill/reflection.hpp"

namespace polybill {

// Collision point: arclength s and angle theta in (-pi/2, pi/2) measured from the inward normal.
struct PhasePoint {
    double s = 0.0;
    double theta = 0.0;
};

enum class SingularKind { HitVertex, TangentRay };

struct Singular {
    SingularKind kind = SingularKind::HitVertex;
};

struct Flight {
    double s1 = 0.0;
    double theta_bar = 0.0;  // specular angle at the next collision, before f is applied
    double t = 0.0;          // free path length
    int edge_from = 0;
    int edge_to = 0;
};

using FlightOutcome = std::variant<Flight, Singular>;

struct Step {
    PhasePoint next;
    Flight flight;
};

using StepOutcome = std::variant<Step, Singular>;

struct Mat2 {
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
};

inline Mat2 operator*(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

// Unit velocity at angle pi/2 - theta from the tangent of the edge.
Vec2 velocity(const Polygon& poly, int edge, double theta);

FlightOutcome flight(const Polygon& poly, PhasePoint x);
StepOutcome step(const Polygon& poly, const ReflectionLaw& f, PhasePoint x);
// Unique preimage under the billiard map, if any.
std::optional<PhasePoint> inverse_step(const Polygon& poly, const ReflectionLaw& f, PhasePoint y);

// pi - delta(L0, L1) - theta.
double angle_after(const Polygon& poly, int edge_from, int edge_to, double theta);

// Derivative of the map at x, given the flight from x.
Mat2 derivative(const ReflectionLaw& f, PhasePoint x, const Flight& fl);
double jacobian(const Polygon& poly, const ReflectionLaw& f, PhasePoint x);

// Entries of D Phi^n = (-1)^n [[alpha, gamma], [0, beta]], kept in log form.
struct Cocycle {
    int n = 0;
    double log_alpha = 0.0;
    double log_abs_beta = 0.0;
    int beta_sign = 1;
    double gamma_over_alpha = 0.0;
    double log_Lambda = 0.0;  // sum of log rho over theta_bar_1..theta_bar_n

    double alpha() const;
    double beta() const;
    double gamma() const;
    double Lambda() const;
    Mat2 matrix() const;
};

struct Orbit {
    std::vector<PhasePoint> points;
    std::vector<Flight> flights;
    std::vector<Cocycle> cocycles;
    std::optional<Singular> termination;

    int steps() const { return static_cast<int>(flights.size()); }
};

Orbit iterate(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int n, bool record_cocycle = true);

}  // namespace polybill
