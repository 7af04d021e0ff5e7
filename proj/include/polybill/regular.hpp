#pragma once

#include <memory>
#include <variant>
#include <vector>

#include <boost/math/constants/constants.hpp>

#include "polybill/algebra.hpp"
#include "polybill/billiard.hpp"

namespace polybill {

// Point of the reduced phase space (0,1) x (-pi/2, pi/2) of a regular polygon with unit sides.
struct ReducedPoint {
    double s = 0.0;
    double theta = 0.0;
};

// theta_k = pi/2 - k pi/d.
double branch_angle(int d, int k);
// gamma_k(theta) for k = 1..d; gamma_1 = 1 and gamma_d = 0 identically.
double branch_curve(int d, int k, double theta);

struct ReducedStep {
    ReducedPoint next;
    int branch = 0;
};

// k-branch of the reduced map on A_k = {gamma_{k+1}(theta) < s < gamma_k(theta)}.
std::variant<ReducedStep, Singular> reduced_step(int d, const ReflectionLaw& f, ReducedPoint x);

// Projection of a phase point of regular_polygon(d, 1) to the reduced phase space.
ReducedPoint project(const Polygon& poly, PhasePoint x);

template <class T>
struct ReducedSlapResult {
    T value;
    bool boundary = false;  // the image is a vertex (0 or 1)
    bool singular = false;  // the image left [0, 1]
};

// Reduced slap map: 1 - s for even d, -(s - 1/2)/beta + eps(s) for odd d, with
// beta = cos(pi/d) and eps(s) = 1 for s >= 1/2. s = 1/2 goes to the vertex value 1.
template <class T>
ReducedSlapResult<T> reduced_slap(int d, const T& s, double tol = kGeomTol) {
    ReducedSlapResult<T> r;
    if (d % 2 == 0) {
        r.value = T(1) - s;
    } else {
        using std::cos;
        T beta = cos(boost::math::constants::pi<T>() / T(d));
        T half = T(1) / T(2);
        r.value = -(s - half) / beta + (s >= half ? T(1) : T(0));
    }
    if (r.value < T(-tol) || r.value > T(1 + tol)) r.singular = true;
    else if (r.value <= T(tol) || r.value >= T(1 - tol)) r.boundary = true;
    return r;
}

// Exact orbit of 1/2 under the odd reduced slap map, as elements of Q(beta).
struct HalfOrbit {
    std::shared_ptr<const NumberField> field;
    std::vector<AlgebraicNumber> values;  // values[j] = phi_0^j(1/2), j = 0..n
    std::vector<int> deltas;              // delta_j = 2 eps(phi_0^j(1/2)) - 1, j = 0..n-1
};

// Requires odd d >= 3. Each branch choice is a certified comparison with 1/2.
HalfOrbit orbit_of_half(int d, int n);

struct PrePeriodicityReport {
    int d = 0;
    int n = 0;
    int pairs = 0;
    int distinct_exact = 0;     // pairs with phi^a(1/2) != phi^b(1/2) in Q(beta)
    int q_certified = 0;        // pairs whose Q(beta) is nonzero with matching exact and numeric signs
    int leading_obstruction = 0;
    bool closed_form_matches = false;  // values agree with 1/2 + P_n(beta) / (2 beta^{n-1})
    bool certified() const { return distinct_exact == pairs && q_certified == pairs && closed_form_matches; }
};

// Checks phi_0^a(1/2) != phi_0^b(1/2) for all 0 <= b < a <= n.
PrePeriodicityReport certify_not_preperiodic(int d, int n);

// sigma_infinity(theta) = 1 - cot(pi/d) sum_{n>=0} tan(f^n(theta)), as an enclosure
// that accounts for the truncated tail.
struct SigmaInfinity {
    double lo = 0.0;
    double hi = 0.0;
    int terms = 0;
};

SigmaInfinity sigma_infinity(int d, const ReflectionLaw& f, double theta);

// Membership in B = {sigma_inf(theta) - 1 < s < sigma_inf(theta)}, claimed only when it
// holds for every value in the enclosure of sigma_inf.
bool trapping_region(int d, const ReflectionLaw& f, ReducedPoint x);

struct EvenNReport {
    int d = 0;
    bool d_ok = false;           // even and at least 6
    bool odd = false;
    bool increasing = false;
    bool lambda_le_half = false;
    bool homogeneity = false;    // f(delta 2pi/d) <= delta f(2pi/d) on a grid of delta in [0, 1]
    double worst_homogeneity = 0.0;  // max of f(delta a) - delta f(a)
    bool linear_remark = false;  // linear law with sigma <= 1/2
    bool hypotheses() const { return d_ok && odd && increasing && lambda_le_half && homogeneity; }

    // Two steps of the continuous extension of the (q-1)-branch from (1, 0), d = 2q.
    ReducedPoint first;
    ReducedPoint second;
    bool first_in_closure = false;  // first lies in the closure of A_{q-1}
    bool key_inclusion = false;     // second lies in B, evaluated directly
    double theta_hat = 0.0;
    // Inequality as printed: cot(pi/2q) sum_{n>=0} tan f^{n+1}(theta_hat) < 1 + tan(theta_hat) sin(pi/q) + cos(pi/q).
    double printed_lhs = 0.0;
    double rhs = 0.0;
    bool printed_holds = false;
    // Same inequality with the sum started at f^0(theta_hat), which is equivalent to the direct test.
    double corrected_lhs = 0.0;
    bool corrected_holds = false;
};

EvenNReport check_evenN_hypotheses(int d, const ReflectionLaw& f);

// Continuous extension of the (q-1)-branch for d = 2q.
ReducedPoint extended_branch(int d, const ReflectionLaw& f, ReducedPoint x);

}  // namespace polybill
