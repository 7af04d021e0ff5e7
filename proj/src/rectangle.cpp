#include "polybill/rectangle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace polybill {

namespace {

// Root of a monotone function on [a, b] with g(a) and g(b) of opposite signs.
double bisect(const std::function<double(double)>& g, double a, double b) {
    double ga = g(a), gb = g(b);
    if (!(ga * gb < 0.0)) throw RectangleError("no root in range");
    for (int it = 0; it < 300; ++it) {
        double m = 0.5 * (a + b);
        if (m <= a || m >= b) break;
        double gm = g(m);
        if (gm == 0.0) return m;
        if ((gm < 0.0) == (ga < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

bool is_long(int edge) { return edge % 2 == 0; }

}  // namespace

double f1(const ReflectionLaw& f, double theta) { return -f(theta); }

double f2(const ReflectionLaw& f, double theta) {
    if (theta == 0.0) throw RectangleError("f2 is undefined at theta = 0");
    return f((theta > 0.0 ? 0.5 : -0.5) * kPi - theta);
}

double trap_series(const ReflectionLaw& f, double theta) {
    double sum = 0.0;
    double x = theta;
    double t = 0.0;
    for (int n = 0; n < 100000; ++n) {
        t = std::tan(std::abs(x));
        sum += t;
        if (t <= 1e-17 * std::max(1.0, sum)) break;
        x = f1(f, x);
    }
    double lam = f.lambda();
    return sum + (lam < 1.0 ? 0.5 * lam * t / (1.0 - lam) : 0.0);
}

RectThresholds solve_thresholds(const RectParams& params) {
    const ReflectionLaw& f = params.f;
    if (!(params.h > 0.0 && params.h <= 1.0)) throw RectangleError("rectangle needs 0 < h <= 1");
    if (!f.is_increasing()) throw RectangleError("rectangle thresholds need an increasing law");
    const double lam = f.lambda();
    if (!(lam > 0.0 && lam < 1.0)) throw RectangleError("rectangle thresholds need 0 < lambda < 1");
    RectThresholds t;
    const double edge = 0.5 * kPi;
    t.theta_plus = bisect([&](double x) { return f(edge - x) - x; }, 0.0, edge);
    t.theta_minus = bisect([&](double x) { return f(-edge - x) - x; }, -edge, 0.0);
    const double target = 1.0 / params.h;
    const double top = edge - 1e-9;
    t.theta_star_plus = bisect([&](double x) { return trap_series(f, x) - target; }, 0.0, top);
    t.theta_star_minus = bisect([&](double x) { return trap_series(f, x) - target; }, -top, 0.0);
    t.theta_tilde = std::min(f2(f, f(edge)), -f2(f, f(-edge)));
    t.m_lambda = 2.0 / std::log(lam) * std::log(2.0 / kPi * std::cos(kPi * lam / 2.0));
    t.b_lambda = r_of_eps(f, kPi * (1.0 - lam) / 2.0);
    t.mu = std::min(std::pow(t.b_lambda, 1.0 / t.m_lambda), 1.0 / std::sqrt(lam));
    return t;
}

bool check_uh_conditions(const RectParams&, const RectThresholds& t) {
    return t.theta_tilde > std::max(-t.theta_star_minus, t.theta_star_plus);
}

bool check_uh_conditions(const RectParams& params) { return check_uh_conditions(params, solve_thresholds(params)); }

bool check_parabolic_conditions(const RectParams& params, const RectThresholds& t) {
    const ReflectionLaw& f = params.f;
    return params.h <= std::tan(t.theta_tilde) && f1(f, t.theta_star_plus) < t.theta_minus && t.theta_plus < f1(f, t.theta_star_minus);
}

bool check_parabolic_conditions(const RectParams& params) {
    return check_parabolic_conditions(params, solve_thresholds(params));
}

std::optional<bool> stays_between_parallel_sides(const Polygon& rect, const ReflectionLaw& f, PhasePoint x) {
    int e = rect.edge_at(x.s);
    double len = rect.edge_length(e);
    double gap = rect.edge_length(e + 1);
    double p = x.s - rect.vertex_arclength(e);
    const double tol = 1e-12 * std::max(1.0, len);
    double lo = p, hi = p;
    double theta = x.theta;
    double sign = 1.0;
    double t = 0.0;
    for (int k = 0; k < 100000; ++k) {
        t = std::tan(theta);
        p += sign * gap * t;
        if (p < -tol || p > len + tol) return false;
        lo = std::min(lo, p);
        hi = std::max(hi, p);
        if (std::abs(t) < 1e-18) break;
        theta = f(-theta);
        sign = -sign;
    }
    double lam = f.lambda();
    double tail = lam < 1.0 ? gap * lam * std::abs(t) / (1.0 - lam) : std::numeric_limits<double>::infinity();
    if (lo - tail > tol && hi + tail < len - tol) return true;
    return std::nullopt;
}

RectClassification classify_orbit(const RectParams& params, PhasePoint x0, int n_max, int max_blocks) {
    return classify_orbit(params, solve_thresholds(params), x0, n_max, max_blocks);
}

RectClassification classify_orbit(const RectParams& params, const RectThresholds& th, PhasePoint x0, int n_max,
                                  int max_blocks) {
    const ReflectionLaw& f = params.f;
    Polygon rect = rectangle(params.h);
    RectClassification out;
    const double log_mu = std::log(th.mu);
    const double band = 0.5 * kPi * f.lambda();
    const double lemma_lo = f1(f, th.theta_star_plus);
    const double lemma_hi = f1(f, th.theta_star_minus);

    auto trapped_now = [&](PhasePoint x) { return stays_between_parallel_sides(rect, f, x); };

    std::optional<bool> pending = trapped_now(x0);
    if (pending == true) {
        out.verdict = RectVerdict::TrappedToP;
        out.trapped_at = 0;
        return out;
    }
    bool recheck = !pending.has_value();

    PhasePoint x = x0;
    int block_start = 0;
    double log_Lambda = 0.0;
    double log_Lambda_start = 0.0;
    int adjacent_count = 0;
    for (int i = 1; i <= n_max; ++i) {
        StepOutcome o = step(rect, f, x);
        if (std::holds_alternative<Singular>(o)) {
            out.singular = true;
            out.verdict = RectVerdict::Undecided;
            return out;
        }
        const Step& st = std::get<Step>(o);
        out.steps = i;
        log_Lambda += std::log(rho(f, st.flight.theta_bar));
        bool parallel = rect.wrap(st.flight.edge_to - st.flight.edge_from) == 2;
        bool run_start = false;
        if (!parallel) {
            ++adjacent_count;
            int m = i - block_start;
            if (block_start >= 1) {
                RectBlock b;
                b.start = block_start;
                b.length = m;
                b.log_Lambda = log_Lambda - log_Lambda_start;
                b.bound_holds = b.log_Lambda >= m * log_mu - 1e-12 * std::max(1.0, m * log_mu);
                b.angle_residual = std::abs(std::abs(st.flight.theta_bar + x.theta) - 0.5 * kPi);
                if (!b.bound_holds) ++out.block_violations;
                out.max_angle_residual = std::max(out.max_angle_residual, b.angle_residual);
                out.max_complete_length = std::max(out.max_complete_length, m);
                if (static_cast<int>(out.blocks.size()) < max_blocks) out.blocks.push_back(b);
            }
            if (i - 1 >= 1 && std::abs(x.theta) < band && std::abs(st.next.theta) < th.theta_tilde - 1e-12)
                ++out.adjacent_lemma_violations;
            block_start = i;
            log_Lambda_start = log_Lambda;
            out.last_run = 0;
            run_start = true;
        } else {
            ++out.last_run;
        }
        x = st.next;
        if (run_start || recheck) {
            std::optional<bool> trapped = trapped_now(x);
            if (run_start && is_long(st.flight.edge_to) && lemma_lo <= x.theta && x.theta <= lemma_hi) {
                ++out.lemma_trapped;
                if (trapped == false) ++out.lemma_disagreements;
            }
            recheck = !trapped.has_value();
            if (trapped == true) {
                out.verdict = RectVerdict::TrappedToP;
                out.trapped_at = i;
                return out;
            }
        }
    }
    out.verdict = (adjacent_count >= 2 && out.last_run <= std::max(out.max_complete_length, 1)) ? RectVerdict::HyperbolicCandidate
                                                                                               : RectVerdict::Undecided;
    return out;
}

}  // namespace polybill
