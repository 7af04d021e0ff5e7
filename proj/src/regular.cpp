#include "polybill/regular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace polybill {

double branch_angle(int d, int k) { return 0.5 * kPi - k * kPi / d; }

double branch_curve(int d, int k, double theta) {
    if (k == 1) return 1.0;
    if (k == d) return 0.0;
    double a = branch_angle(d, k - 1);
    double b = branch_angle(d, k);
    return std::sin(a - theta) * std::cos(b) / (std::sin(a - b) * std::cos(theta));
}

std::variant<ReducedStep, Singular> reduced_step(int d, const ReflectionLaw& f, ReducedPoint x) {
    if (!(x.s > kGeomTol && x.s < 1.0 - kGeomTol) || !(std::abs(x.theta) < 0.5 * kPi - kGeomTol))
        return Singular{SingularKind::HitVertex};
    for (int k = 1; k < d; ++k) {
        double upper = branch_curve(d, k, x.theta);
        double lower = branch_curve(d, k + 1, x.theta);
        if (std::abs(x.s - upper) <= kGeomTol || std::abs(x.s - lower) <= kGeomTol) return Singular{SingularKind::HitVertex};
        if (lower < x.s && x.s < upper) {
            ReducedStep r;
            r.branch = k;
            r.next.s = (upper - x.s) / (upper - lower);
            r.next.theta = f(2.0 * branch_angle(d, k) - x.theta);
            return r;
        }
    }
    return Singular{SingularKind::HitVertex};
}

ReducedPoint project(const Polygon& poly, PhasePoint x) {
    int e = poly.edge_at(x.s);
    return {(x.s - poly.vertex_arclength(e)) / poly.edge_length(e), x.theta};
}

HalfOrbit orbit_of_half(int d, int n) {
    if (d < 3 || d % 2 == 0) throw std::invalid_argument("orbit_of_half needs an odd d >= 3");
    HalfOrbit orb;
    orb.field = std::make_shared<const NumberField>(d);
    const Rational half(1, 2);
    AlgebraicNumber inv_beta = AlgebraicNumber::beta(orb.field).inverse();
    AlgebraicNumber x = AlgebraicNumber::rational(orb.field, half);
    orb.values.push_back(x);
    for (int j = 0; j < n; ++j) {
        int eps = x.compare(half) >= 0 ? 1 : 0;
        orb.deltas.push_back(2 * eps - 1);
        x = AlgebraicNumber::rational(orb.field, Rational(eps)) - (x - AlgebraicNumber::rational(orb.field, half)) * inv_beta;
        orb.values.push_back(x);
    }
    return orb;
}

PrePeriodicityReport certify_not_preperiodic(int d, int n) {
    PrePeriodicityReport rep;
    rep.d = d;
    rep.n = n;
    HalfOrbit orb = orbit_of_half(d, n);
    const auto& field = orb.field;

    // Closed form 1/2 + P_j(beta) / (2 beta^{j-1}).
    rep.closed_form_matches = true;
    AlgebraicNumber beta = AlgebraicNumber::beta(field);
    AlgebraicNumber inv_beta = beta.inverse();
    AlgebraicNumber half = AlgebraicNumber::rational(field, Rational(1, 2));
    AlgebraicNumber beta_pow = beta;  // beta^{-(j-1)} for j = 0
    for (int j = 0; j <= n; ++j) {
        IntPoly p = orbit_polynomial(orb.deltas, j);
        RatPoly rp;
        for (const auto& c : p.c) rp.c.push_back(Rational(c));
        AlgebraicNumber value = half + half * AlgebraicNumber(field, rp) * beta_pow;
        if (!(value == orb.values[j])) rep.closed_form_matches = false;
        beta_pow = beta_pow * inv_beta;
    }

    for (int a = 1; a <= n; ++a) {
        for (int b = 0; b < a; ++b) {
            ++rep.pairs;
            if (!(orb.values[a] == orb.values[b])) ++rep.distinct_exact;
            QCertificate c = certify_q_nonzero(d, a, b, orb.deltas);
            if (c.certified()) ++rep.q_certified;
            if (c.leading_obstruction) ++rep.leading_obstruction;
        }
    }
    return rep;
}

SigmaInfinity sigma_infinity(int d, const ReflectionLaw& f, double theta) {
    double sum = 0.0;
    double th = theta;
    int terms = 0;
    double last = 0.0;
    for (; terms < 100000; ++terms) {
        last = std::tan(th);
        sum += last;
        if (std::abs(last) < 1e-16) break;
        th = f(th);
    }
    double lam = f.lambda();
    // tan(lambda x) <= lambda tan(x) on [0, pi/2), so the tail is geometric.
    double tail = lam < 1.0 ? lam * std::abs(last) / (1.0 - lam) : std::numeric_limits<double>::infinity();
    tail += 1e-15 * (1.0 + std::abs(sum));
    double cot = 1.0 / std::tan(kPi / d);
    SigmaInfinity out;
    out.terms = terms + 1;
    out.lo = 1.0 - cot * (sum + tail);
    out.hi = 1.0 - cot * (sum - tail);
    if (theta == 0.0) out.lo = out.hi = 1.0;
    return out;
}

bool trapping_region(int d, const ReflectionLaw& f, ReducedPoint x) {
    SigmaInfinity sig = sigma_infinity(d, f, x.theta);
    return x.s > sig.hi - 1.0 && x.s < sig.lo;
}

ReducedPoint extended_branch(int d, const ReflectionLaw& f, ReducedPoint x) {
    int q = d / 2;
    double g = kPi / q - x.theta;
    double s = std::tan(g) / std::tan(kPi / (2.0 * q)) - x.s * std::cos(x.theta) / std::cos(g);
    return {s, f(g)};
}

EvenNReport check_evenN_hypotheses(int d, const ReflectionLaw& f) {
    EvenNReport rep;
    rep.d = d;
    rep.d_ok = d % 2 == 0 && d >= 6;
    rep.odd = f.is_odd();
    rep.increasing = f.is_increasing();
    rep.lambda_le_half = f.lambda() <= 0.5 + 1e-15;
    const double a = 2.0 * kPi / d;
    const double fa = f(a);
    rep.worst_homogeneity = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
        double delta = i / 1000.0;
        rep.worst_homogeneity = std::max(rep.worst_homogeneity, f(delta * a) - delta * fa);
    }
    rep.homogeneity = rep.worst_homogeneity <= 1e-14;
    rep.linear_remark = f.kind() == LawKind::Linear && f.sigma() <= 0.5;
    if (d % 2 != 0 || d < 6) return rep;

    int q = d / 2;
    rep.first = extended_branch(d, f, {1.0, 0.0});
    rep.second = extended_branch(d, f, rep.first);
    double th = rep.first.theta;
    rep.first_in_closure = branch_curve(d, q, th) <= 1.0 + 1e-12 && branch_curve(d, q - 1, th) >= 1.0 - 1e-12;
    rep.key_inclusion = trapping_region(d, f, rep.second);

    rep.theta_hat = kPi / q - f(kPi / q);
    double cot = 1.0 / std::tan(kPi / (2.0 * q));
    rep.rhs = 1.0 + std::tan(rep.theta_hat) * std::sin(kPi / q) + std::cos(kPi / q);
    double tail_sum = 0.0;
    double x = rep.theta_hat;
    double t0 = std::tan(x);
    for (int n = 0; n < 100000; ++n) {
        x = f(x);
        double t = std::tan(x);
        tail_sum += t;
        if (std::abs(t) < 1e-17) break;
    }
    rep.printed_lhs = cot * tail_sum;
    rep.printed_holds = rep.printed_lhs < rep.rhs;
    rep.corrected_lhs = cot * (t0 + tail_sum);
    rep.corrected_holds = rep.corrected_lhs < rep.rhs;
    return rep;
}

}  // namespace polybill
