#pragma once

#include <cmath>
#include <vector>

#include "polybill/billiard.hpp"

namespace polybill {

// Points of edge `edge` whose trajectory runs straight into vertex `vertex`:
// theta = atan((s_bar - s) / l) for s in [s_lo, s_hi].
struct SingularCurve {
    int edge = 0;
    int vertex = 0;
    double s_lo = 0.0;
    double s_hi = 0.0;
    double s_bar = 0.0;
    double l = 0.0;

    double theta(double s) const { return std::atan((s_bar - s) / l); }
    double slope(double s) const { return -l / (l * l + (s_bar - s) * (s_bar - s)); }
};

std::vector<SingularCurve> singular_set_s1_plus(const Polygon& poly);

// Image of a forward singular curve under (s, theta) -> (s, f(-theta)).
struct ImageCurve {
    SingularCurve source;
    ReflectionLaw law;

    double theta(double s) const { return law(-source.theta(s)); }
};

std::vector<ImageCurve> singular_set_s1_minus(const Polygon& poly, const ReflectionLaw& f);

// Sampled smooth piece of the forward singular set of some generation k:
// the piece lies in Phi^{-k} of forward singular curve `source`.
struct CurvePiece {
    int generation = 0;
    int source = 0;
    int edge = 0;
    std::vector<int> itinerary;  // edges of the backward images, nearest first
    std::vector<PhasePoint> points;
};

// Smooth pieces of S_m^+ = union over k < m of Phi^{-k}(S_1^+), sampled with
// `resolution` points per forward curve. Piece ends are refined by bisection.
std::vector<CurvePiece> pullback_singular(const Polygon& poly, const ReflectionLaw& f, int m, int resolution);

struct PEstimate {
    int p = 0;
    int resolution = 0;
    int rounds = 0;
};

// One plus the largest number of smooth pieces of S_m^+ meeting at a point of the
// open strips. Resolution doubles until the value is unchanged twice in a row.
PEstimate p_of_S(const Polygon& poly, const ReflectionLaw& f, int m, int resolution = 200, int max_rounds = 6);

// The same count for a fixed set of pieces.
int branch_multiplicity(const Polygon& poly, const std::vector<CurvePiece>& pieces, double touch_tol);

}  // namespace polybill
