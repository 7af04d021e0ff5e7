#include "polybill/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "polybill/parallel.hpp"
#include "polybill/random.hpp"

namespace polybill {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log alpha_m at x, or nothing when the orbit is singular within m steps.
std::optional<double> log_alpha_m(const Polygon& poly, const ReflectionLaw& f, PhasePoint x, int m) {
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        StepOutcome o = step(poly, f, x);
        if (std::holds_alternative<Singular>(o)) return std::nullopt;
        const Step& st = std::get<Step>(o);
        acc += std::log(std::cos(x.theta)) - std::log(std::cos(st.flight.theta_bar));
        x = st.next;
    }
    return acc;
}

double wrap_difference(double d, double perimeter) {
    d = std::fmod(d, perimeter);
    if (d > 0.5 * perimeter) d -= perimeter;
    if (d < -0.5 * perimeter) d += perimeter;
    return d;
}

}  // namespace

bool parallel_transition(const Polygon& poly, const Flight& fl) { return parallel_edges(poly, fl.edge_from, fl.edge_to); }

LyapunovEstimate lyapunov_top(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int n) {
    LyapunovEstimate out;
    double sum_log_rho = 0.0;  // over theta_bar_1 .. theta_bar_{k-1}
    double direct = 0.0;
    double last_log_rho = 0.0;
    double log_cos_bar = 0.0;
    PhasePoint x = x0;
    for (int i = 0; i < n; ++i) {
        StepOutcome o = step(poly, f, x);
        if (std::holds_alternative<Singular>(o)) {
            out.singular = true;
            break;
        }
        const Step& st = std::get<Step>(o);
        sum_log_rho += last_log_rho;
        last_log_rho = std::log(rho(f, st.flight.theta_bar));
        log_cos_bar = std::log(std::cos(st.flight.theta_bar));
        direct += std::log(std::cos(x.theta)) - log_cos_bar;
        x = st.next;
        out.steps = i + 1;
    }
    if (out.steps == 0) return out;
    const double k = out.steps;
    out.value = (sum_log_rho + std::log(std::cos(x0.theta)) - log_cos_bar) / k;
    out.direct = direct / k;
    return out;
}

std::vector<LyapunovEstimate> lyapunov_ensemble(const Polygon& poly, const ReflectionLaw& f, int n, int seeds,
                                                std::uint64_t rng_seed) {
    std::vector<LyapunovEstimate> out(static_cast<std::size_t>(std::max(seeds, 0)));
    parallel_for(out.size(), [&](std::size_t i) {
        auto g = stream_rng(rng_seed, i);
        out[i] = lyapunov_top(poly, f, random_phase_point(poly, g), n);
    });
    return out;
}

ParallelRuns parallel_runs(const Polygon& poly, const Orbit& orbit) {
    ParallelRuns runs;
    int current = 0;  // parallel transitions in the open run
    for (const Flight& fl : orbit.flights) {
        if (parallel_transition(poly, fl)) {
            ++current;
        } else {
            runs.max_closed = std::max(runs.max_closed, current + 1);
            current = 0;
        }
    }
    runs.trailing = current + 1;
    return runs;
}

double min_delta(const Polygon& poly) {
    double best = kInf;
    for (int i = 0; i < poly.size(); ++i)
        for (int j = 0; j < poly.size(); ++j) {
            if (i == j || parallel_edges(poly, i, j) || !sides_see_each_other(poly, i, j)) continue;
            best = std::min(best, std::abs(kPi - delta_angle(poly, i, j)) / 2.0);
        }
    return best;
}

UniformBoundReport uniform_bound_check(const Polygon& poly, const ReflectionLaw& f, const Orbit& orbit, double eps, int m) {
    UniformBoundReport rep;
    rep.Delta = min_delta(poly);
    rep.eps = eps;
    if (!(eps > 0.0 && eps < rep.Delta)) throw AnalysisError(AnalysisErrorKind::EpsTooLarge, "eps must lie in (0, Delta)");
    rep.runs = parallel_runs(poly, orbit);
    if (m > 0) {
        rep.m = m;
        rep.applicable = rep.runs.max_closed <= m && rep.runs.trailing <= m;
    } else {
        rep.m = rep.runs.max_closed;
        rep.applicable = rep.runs.trailing <= rep.m;
    }
    rep.r_eps = r_of_eps(f, eps);
    const double log_r = std::log(rep.r_eps);
    const auto& fl = orbit.flights;
    const int n = static_cast<int>(fl.size());

    for (int i = 1; i < n; ++i) {
        if (parallel_transition(poly, fl[i])) continue;
        ++rep.pair_checks;
        double prod = rho(f, fl[i - 1].theta_bar) * rho(f, fl[i].theta_bar);
        if (prod < rep.r_eps * (1.0 - 1e-12)) ++rep.pair_violations;
    }

    rep.worst_margin = kInf;
    double log_Lambda = 0.0;
    for (int k = 1; k <= n; ++k) {
        log_Lambda += std::log(rho(f, fl[k - 1].theta_bar));
        double rhs = static_cast<double>(k - rep.m - 1) / (rep.m + 2) * log_r;
        ++rep.bound_checks;
        double margin = log_Lambda - rhs;
        rep.worst_margin = std::min(rep.worst_margin, margin);
        if (margin < -1e-12 * (1.0 + std::abs(rhs))) ++rep.bound_violations;
    }
    return rep;
}

UnstableDirection unstable_direction(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int depth) {
    Orbit orb = iterate(poly, f, x0, depth, true);
    if (orb.steps() < depth) throw AnalysisError(AnalysisErrorKind::SingularBeforeDepth, "orbit hits a vertex before the requested depth");
    UnstableDirection out;
    out.depth = depth;
    out.gamma_over_alpha = orb.cocycles.back().gamma_over_alpha;
    double len = std::hypot(out.gamma_over_alpha, 1.0);
    out.direction = {-out.gamma_over_alpha / len, 1.0 / len};
    const double lam = f.lambda();
    double c = std::min(std::cos(x0.theta), std::cos(0.5 * kPi * lam));
    out.truncation_bound = lam < 1.0 ? poly.diameter() * std::pow(lam, depth) / ((1.0 - lam) * c) : kInf;
    return out;
}

AcuteTriangleReport acute_triangle_criterion(const Polygon& poly, const ReflectionLaw& f) {
    if (poly.size() != 3) throw AnalysisError(AnalysisErrorKind::NotATriangle, "polygon is not a triangle");
    AcuteTriangleReport rep;
    double min_gap = kInf;
    for (int i = 0; i < 3; ++i) {
        double phi = poly.interior_angle(i);
        rep.max_angle = std::max(rep.max_angle, phi);
        min_gap = std::min(min_gap, 0.5 * kPi - phi);
    }
    rep.all_acute = rep.max_angle < 0.5 * kPi - 1e-12;
    rep.bound = std::max(0.0, 2.0 / kPi * min_gap);
    rep.lambda = f.lambda();
    rep.holds = rep.all_acute && rep.lambda < rep.bound;

    rep.strip_min_theta = kInf;
    for (const SingularCurve& c : singular_set_s1_plus(poly)) {
        for (double s : {c.s_lo, c.s_hi}) {
            int e = c.edge;
            bool at_vertex = std::abs(s - poly.vertex_arclength(e)) < 1e-12 ||
                             std::abs(s - (poly.vertex_arclength(e) + poly.edge_length(e))) < 1e-12;
            if (at_vertex) rep.strip_min_theta = std::min(rep.strip_min_theta, std::abs(c.theta(s)));
        }
    }
    rep.strip_clear = rep.strip_min_theta > 0.5 * kPi * rep.lambda;
    return rep;
}

AlphaInfimum alpha_m_infimum(const Polygon& poly, const ReflectionLaw& f, int m, int resolution) {
    const double band = 0.5 * kPi * f.lambda();
    const int n_theta = band > 0.0 ? resolution : 1;
    const int edges = poly.size();
    struct Cell {
        double value = kInf;
        PhasePoint x;
        long regular = 0;
    };
    // One task per (edge, s index); each keeps its own minimum.
    std::vector<Cell> cells(static_cast<std::size_t>(edges) * resolution);
    std::vector<std::vector<std::pair<double, PhasePoint>>> lows(cells.size());
    const int keep = 4;
    auto theta_at = [&](double j) { return band > 0.0 ? -band + 2.0 * band * (j + 0.5) / n_theta : 0.0; };
    parallel_for(cells.size(), [&](std::size_t idx) {
        int e = static_cast<int>(idx) / resolution;
        int i = static_cast<int>(idx) % resolution;
        double s = poly.vertex_arclength(e) + poly.edge_length(e) * (i + 0.5) / resolution;
        Cell& c = cells[idx];
        auto& low = lows[idx];
        for (int j = 0; j < n_theta; ++j) {
            PhasePoint x{s, theta_at(j)};
            auto la = log_alpha_m(poly, f, x, m);
            if (!la) continue;
            ++c.regular;
            if (*la < c.value) {
                c.value = *la;
                c.x = x;
            }
            low.push_back({*la, x});
            std::sort(low.begin(), low.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
            if (static_cast<int>(low.size()) > keep) low.pop_back();
        }
    });

    AlphaInfimum out;
    out.grid_points = static_cast<long>(cells.size()) * n_theta;
    std::vector<std::pair<double, PhasePoint>> best;
    double value = kInf;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        out.regular_points += cells[k].regular;
        if (cells[k].value < value) {
            value = cells[k].value;
            out.argmin = cells[k].x;
        }
        best.insert(best.end(), lows[k].begin(), lows[k].end());
    }
    std::sort(best.begin(), best.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    if (best.size() > 16) best.resize(16);

    // Local refinement around the smallest grid values, where the infimum may sit close to N_m^+.
    for (auto& [v0, x0] : best) {
        int e = poly.edge_at(x0.s);
        double lo_s = poly.vertex_arclength(e), hi_s = lo_s + poly.edge_length(e);
        double hs = poly.edge_length(e) / resolution;
        double ht = band > 0.0 ? 2.0 * band / n_theta : 0.0;
        PhasePoint centre = x0;
        double cv = v0;
        for (int round = 0; round < 4; ++round) {
            for (int a = -4; a <= 4; ++a)
                for (int b = -4; b <= 4; ++b) {
                    PhasePoint x{centre.s + a * hs / 4.0, centre.theta + b * ht / 4.0};
                    if (x.s <= lo_s || x.s >= hi_s || std::abs(x.theta) >= band + (band > 0.0 ? 0.0 : 1.0)) continue;
                    auto la = log_alpha_m(poly, f, x, m);
                    if (la && *la < cv) {
                        cv = *la;
                        centre = x;
                    }
                }
            hs /= 4.0;
            ht /= 4.0;
        }
        if (cv < value) {
            value = cv;
            out.argmin = centre;
        }
    }
    out.value = std::exp(value);
    return out;
}

SRBHypothesisReport srb_hypothesis_check(const Polygon& poly, const ReflectionLaw& f, int m, int resolution) {
    if (has_parallel_facing(poly))
        throw AnalysisError(AnalysisErrorKind::ParallelFacingSides, "polygon has parallel sides facing each other");
    SRBHypothesisReport rep;
    rep.m = m;
    rep.resolution = resolution;
    PEstimate p = p_of_S(poly, f, m);
    rep.p_Sm = p.p;
    rep.p_resolution = p.resolution;
    AlphaInfimum a = alpha_m_infimum(poly, f, m, resolution);
    rep.alpha_m_lower = a.value;
    rep.argmin = a.argmin;
    rep.grid_points = a.grid_points;
    rep.regular_points = a.regular_points;
    rep.satisfied = rep.alpha_m_lower > rep.margin * rep.p_Sm;
    rep.caveat = "alpha is a grid infimum over |theta| < pi lambda / 2 with local refinement; an estimate, not a proven bound";
    return rep;
}

double distance_to_singular(const Polygon& poly, const std::vector<SingularCurve>& curves, PhasePoint x) {
    double best = kInf;
    const double per = poly.perimeter();
    for (int v = 0; v < poly.size(); ++v) best = std::min(best, std::abs(wrap_difference(x.s - poly.vertex_arclength(v), per)));
    int e = poly.edge_at(x.s);
    for (const SingularCurve& c : curves) {
        if (c.edge != e) continue;
        if (x.s >= c.s_lo && x.s <= c.s_hi) {
            double k = c.slope(x.s);
            best = std::min(best, std::abs(x.theta - c.theta(x.s)) / std::sqrt(1.0 + k * k));
        }
        for (double s : {c.s_lo, c.s_hi}) best = std::min(best, std::hypot(x.s - s, x.theta - c.theta(s)));
    }
    return best;
}

GrowthReport growth_check(const Polygon& poly, const ReflectionLaw& f, PhasePoint a, PhasePoint b, int n,
                          const std::vector<double>& eps_list, int samples) {
    if (a.theta != b.theta) throw AnalysisError(AnalysisErrorKind::GammaNotHorizontal, "Gamma must have constant theta");
    if (b.s < a.s) std::swap(a, b);
    int e = poly.edge_at(0.5 * (a.s + b.s));
    double lo = poly.vertex_arclength(e), hi = lo + poly.edge_length(e);
    if (!(a.s >= lo && b.s <= hi && b.s > a.s))
        throw AnalysisError(AnalysisErrorKind::GammaNotHorizontal, "Gamma must be a nondegenerate segment of one side");

    const auto curves = singular_set_s1_plus(poly);
    std::vector<double> dist(static_cast<std::size_t>(samples), kInf);
    std::vector<char> singular(static_cast<std::size_t>(samples), 0);
    const std::size_t chunk = 4096;
    const std::size_t chunks = (dist.size() + chunk - 1) / chunk;
    parallel_for(chunks, [&](std::size_t c) {
        for (std::size_t k = c * chunk; k < std::min(dist.size(), (c + 1) * chunk); ++k) {
            PhasePoint x{a.s + (b.s - a.s) * (static_cast<double>(k) + 0.5) / samples, a.theta};
            bool ok = true;
            for (int i = 0; i < n; ++i) {
                StepOutcome o = step(poly, f, x);
                if (std::holds_alternative<Singular>(o)) {
                    ok = false;
                    break;
                }
                x = std::get<Step>(o).next;
            }
            if (!ok) {
                singular[k] = 1;
                continue;
            }
            dist[k] = distance_to_singular(poly, curves, x);
        }
    });

    GrowthReport rep;
    rep.n = n;
    rep.samples = samples;
    rep.gamma_length = b.s - a.s;
    for (char s : singular) rep.singular_samples += s;
    std::vector<double> sorted = dist;
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> lx, ly;
    for (double eps : eps_list) {
        auto count = std::lower_bound(sorted.begin(), sorted.end(), eps) - sorted.begin();
        double len = rep.gamma_length * static_cast<double>(count) / samples;
        rep.eps.push_back(eps);
        rep.length.push_back(len);
        if (len > 0.0) {
            lx.push_back(std::log(eps));
            ly.push_back(std::log(len));
        }
    }
    if (lx.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            mx += lx[i];
            my += ly[i];
        }
        mx /= lx.size();
        my /= lx.size();
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxx += (lx[i] - mx) * (lx[i] - mx);
            sxy += (lx[i] - mx) * (ly[i] - my);
        }
        rep.slope = sxy / sxx;
        rep.intercept = my - rep.slope * mx;
        double ss = 0.0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            double r = ly[i] - (rep.intercept + rep.slope * lx[i]);
            ss += r * r;
        }
        rep.residual = std::sqrt(ss / lx.size());
    } else {
        rep.slope = std::nan("");
        rep.intercept = std::nan("");
        rep.residual = std::nan("");
    }
    return rep;
}

bool is_regular_polygon(const Polygon& poly) {
    for (int i = 1; i < poly.size(); ++i) {
        if (std::abs(poly.edge_length(i) - poly.edge_length(0)) > 1e-12 * poly.edge_length(0)) return false;
        if (std::abs(poly.interior_angle(i) - poly.interior_angle(0)) > 1e-12) return false;
    }
    return true;
}

double Histogram2D::theta_center(int i_theta) const { return -0.5 * kPi + kPi * (i_theta + 0.5) / grid_theta; }
double Histogram2D::s_center(int i_s) const { return s_max * (i_s + 0.5) / grid_s; }

Histogram2D attractor_histogram(const Polygon& poly, const ReflectionLaw& f, const HistogramParams& params) {
    Histogram2D h;
    h.grid_s = params.grid_s;
    h.grid_theta = params.grid_theta;
    h.reduced = is_regular_polygon(poly);
    h.s_max = h.reduced ? 1.0 : poly.perimeter();
    h.n_transient = params.n_transient;
    h.n_orbits = params.n_orbits;
    h.band = 0.5 * kPi * f.lambda();
    const std::size_t cells = static_cast<std::size_t>(h.grid_s) * h.grid_theta;

    struct OrbitCounts {
        std::vector<std::pair<std::size_t, long>> hits;  // sparse (cell, count)
        long samples = 0;
        double max_abs_theta = 0.0;
        bool singular = false;
    };
    std::vector<OrbitCounts> per(static_cast<std::size_t>(params.n_orbits));
    parallel_for(per.size(), [&](std::size_t k) {
        auto g = stream_rng(params.rng_seed, k);
        PhasePoint x = random_phase_point(poly, g);
        OrbitCounts& oc = per[k];
        std::vector<std::size_t> idx;
        idx.reserve(static_cast<std::size_t>(params.n_keep));
        for (int i = 0; i < params.n_transient + params.n_keep; ++i) {
            StepOutcome o = step(poly, f, x);
            if (std::holds_alternative<Singular>(o)) {
                oc.singular = true;
                break;
            }
            x = std::get<Step>(o).next;
            if (i < params.n_transient) continue;
            oc.max_abs_theta = std::max(oc.max_abs_theta, std::abs(x.theta));
            double s = x.s;
            if (h.reduced) {
                int e = poly.edge_at(s);
                s = (s - poly.vertex_arclength(e)) / poly.edge_length(e);
            }
            int is = std::clamp(static_cast<int>(s / h.s_max * h.grid_s), 0, h.grid_s - 1);
            int it = std::clamp(static_cast<int>((x.theta + 0.5 * kPi) / kPi * h.grid_theta), 0, h.grid_theta - 1);
            idx.push_back(static_cast<std::size_t>(is) * h.grid_theta + it);
        }
        std::sort(idx.begin(), idx.end());
        for (std::size_t a = 0; a < idx.size();) {
            std::size_t b = a;
            while (b < idx.size() && idx[b] == idx[a]) ++b;
            oc.hits.push_back({idx[a], static_cast<long>(b - a)});
            a = b;
        }
        oc.samples = static_cast<long>(idx.size());
    });

    std::vector<double> half[2] = {std::vector<double>(cells, 0.0), std::vector<double>(cells, 0.0)};
    long half_n[2] = {0, 0};
    for (std::size_t k = 0; k < per.size(); ++k) {
        const OrbitCounts& oc = per[k];
        if (oc.singular) ++h.singular_orbits;
        h.max_abs_theta = std::max(h.max_abs_theta, oc.max_abs_theta);
        for (const auto& [cell, count] : oc.hits) half[k % 2][cell] += static_cast<double>(count);
        half_n[k % 2] += oc.samples;
    }
    h.n_samples = half_n[0] + half_n[1];
    if (h.n_samples == 0) throw AnalysisError(AnalysisErrorKind::AllOrbitsSingular, "every orbit hit a vertex during the transient");
    h.mass.assign(cells, 0.0);
    double tv = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        h.mass[c] = (half[0][c] + half[1][c]) / static_cast<double>(h.n_samples);
        if (half_n[0] > 0 && half_n[1] > 0) tv += std::abs(half[0][c] / half_n[0] - half[1][c] / half_n[1]);
    }
    h.tv_halves = (half_n[0] > 0 && half_n[1] > 0) ? 0.5 * tv : 1.0;
    h.support_ok = h.max_abs_theta < h.band + kPi / h.grid_theta;
    return h;
}

ZeroMeasureReport zero_measure_checks(const Polygon& poly, const ReflectionLaw& f, std::uint64_t rng_seed) {
    ZeroMeasureReport rep;
    const double lam = f.lambda();
    const double band = 0.5 * kPi * lam;
    rep.zero1_gap = kInf;
    rep.zero1_Jbar = 0.0;
    for (int i = 0; i < poly.size(); ++i)
        for (int j = 0; j < poly.size(); ++j) {
            if (i == j || !sides_see_each_other(poly, i, j)) continue;
            double c = angle_after(poly, i, j, 0.0);
            rep.zero1_gap = std::min(rep.zero1_gap, std::abs(std::abs(c) - 0.5 * kPi));
            if (std::abs(c) - band >= 0.5 * kPi) continue;  // no collision from the strip
            double worst = std::abs(c) + band;
            rep.zero1_Jbar = std::max(rep.zero1_Jbar, worst < 0.5 * kPi ? lam / std::cos(worst) : kInf);
        }
    rep.zero1_hypothesis = rep.zero1_gap > 1e-9;
    rep.zero1_Jbar_below_one = rep.zero1_Jbar < 1.0;

    HistogramParams hp;
    hp.n_orbits = 16;
    hp.n_transient = 200;
    hp.n_keep = 500;
    hp.rng_seed = rng_seed;
    std::vector<double> jmax(static_cast<std::size_t>(hp.n_orbits), 0.0);
    std::vector<long> count(jmax.size(), 0);
    parallel_for(jmax.size(), [&](std::size_t k) {
        auto g = stream_rng(rng_seed, k);
        PhasePoint x = random_phase_point(poly, g);
        for (int i = 0; i < hp.n_transient + hp.n_keep; ++i) {
            StepOutcome o = step(poly, f, x);
            if (std::holds_alternative<Singular>(o)) break;
            x = std::get<Step>(o).next;
            if (i < hp.n_transient) continue;
            double J = jacobian(poly, f, x);
            if (std::isnan(J)) continue;
            jmax[k] = std::max(jmax[k], J);
            ++count[k];
        }
    });
    for (std::size_t k = 0; k < jmax.size(); ++k) {
        rep.sampled_J_max = std::max(rep.sampled_J_max, jmax[k]);
        rep.samples += count[k];
    }
    rep.zero2_sup = f.sup_derivative_over_cos();
    rep.zero2_hypothesis = rep.zero2_sup < 1.0;
    return rep;
}

namespace {

struct Composite {
    PhasePoint end;
    Mat2 D;
    std::vector<PhasePoint> points;
    std::vector<Flight> flights;
};

std::optional<Composite> compose(const Polygon& poly, const ReflectionLaw& f, PhasePoint x, int q) {
    Composite c;
    c.points.push_back(x);
    for (int i = 0; i < q; ++i) {
        StepOutcome o = step(poly, f, x);
        if (std::holds_alternative<Singular>(o)) return std::nullopt;
        const Step& st = std::get<Step>(o);
        c.D = derivative(f, x, st.flight) * c.D;
        c.flights.push_back(st.flight);
        x = st.next;
        c.points.push_back(x);
    }
    c.end = x;
    return c;
}

}  // namespace

std::vector<PeriodicOrbit> find_periodic_orbits(const Polygon& poly, const ReflectionLaw& f, int q_max, int seeds_per_side) {
    const double per = poly.perimeter();
    const double band = std::max(0.5 * kPi * f.lambda(), 1e-3);
    struct Found {
        bool ok = false;
        PeriodicOrbit orbit;
    };
    const int edges = poly.size();
    const std::size_t tasks = static_cast<std::size_t>(q_max) * edges * seeds_per_side * seeds_per_side;
    std::vector<Found> found(tasks);
    parallel_for(tasks, [&](std::size_t t) {
        int q = 1 + static_cast<int>(t / (static_cast<std::size_t>(edges) * seeds_per_side * seeds_per_side));
        std::size_t rem = t % (static_cast<std::size_t>(edges) * seeds_per_side * seeds_per_side);
        int e = static_cast<int>(rem / (seeds_per_side * seeds_per_side));
        int i = static_cast<int>(rem / seeds_per_side) % seeds_per_side;
        int j = static_cast<int>(rem % seeds_per_side);
        PhasePoint x{poly.vertex_arclength(e) + poly.edge_length(e) * (i + 0.5) / seeds_per_side,
                     -band + 2.0 * band * (j + 0.5) / seeds_per_side};
        const double lo_s = poly.vertex_arclength(e), hi_s = lo_s + poly.edge_length(e);
        auto residual = [&](const Composite& c) {
            return Vec2{wrap_difference(c.end.s - c.points[0].s, per), c.end.theta - c.points[0].theta};
        };
        for (int it = 0; it < 60; ++it) {
            auto c = compose(poly, f, x, q);
            if (!c) return;
            Vec2 r = residual(*c);
            double rn = norm(r);
            if (rn < 1e-13) {
                // Minimal period and canonical start.
                int period = q;
                for (int k = 1; k < q; ++k) {
                    if (q % k) continue;
                    if (std::abs(wrap_difference(c->points[k].s - x.s, per)) < 1e-9 && std::abs(c->points[k].theta - x.theta) < 1e-9) {
                        period = k;
                        break;
                    }
                }
                if (period != q) return;
                Found& out = found[t];
                out.ok = true;
                out.orbit.period = q;
                out.orbit.points.assign(c->points.begin(), c->points.end() - 1);
                out.orbit.residual = rn;
                double log_alpha = 0.0;
                out.orbit.zeta = 1.0;
                for (int k = 0; k < q; ++k) {
                    log_alpha += std::log(std::cos(c->points[k].theta)) - std::log(std::cos(c->flights[k].theta_bar));
                    out.orbit.zeta = std::max(out.orbit.zeta, rho(f, c->flights[k].theta_bar));
                }
                out.orbit.alpha = std::exp(log_alpha);
                return;
            }
            Mat2 J = c->D;
            J.a -= 1.0;
            J.d -= 1.0;
            // Levenberg-Marquardt step; the tiny shift keeps it defined on the parabolic
            // families of period two, where D Phi^q - I is singular.
            double n11 = J.a * J.a + J.c * J.c, n12 = J.a * J.b + J.c * J.d, n22 = J.b * J.b + J.d * J.d;
            double shift = 1e-14 * (n11 + n22) + 1e-300;
            n11 += shift;
            n22 += shift;
            Vec2 g{J.a * r.x + J.c * r.y, J.b * r.x + J.d * r.y};
            double det = n11 * n22 - n12 * n12;
            if (!(std::abs(det) > 0.0)) return;
            Vec2 dx{-(n22 * g.x - n12 * g.y) / det, -(-n12 * g.x + n11 * g.y) / det};
            double damp = 1.0;
            bool improved = false;
            for (int h = 0; h < 30; ++h, damp *= 0.5) {
                PhasePoint y{x.s + damp * dx.x, x.theta + damp * dx.y};
                if (y.s <= lo_s || y.s >= hi_s || std::abs(y.theta) >= 0.5 * kPi) continue;
                auto cy = compose(poly, f, y, q);
                if (!cy) continue;
                if (norm(residual(*cy)) < rn) {
                    x = y;
                    improved = true;
                    break;
                }
            }
            if (!improved) return;
        }
    });

    std::vector<PeriodicOrbit> out;
    for (const Found& fd : found) {
        if (!fd.ok) continue;
        bool duplicate = false;
        for (const PeriodicOrbit& o : out) {
            if (o.period != fd.orbit.period) continue;
            for (const PhasePoint& p : o.points)
                if (std::abs(wrap_difference(p.s - fd.orbit.points[0].s, per)) < 1e-8 && std::abs(p.theta - fd.orbit.points[0].theta) < 1e-8)
                    duplicate = true;
            if (duplicate) break;
        }
        if (!duplicate) out.push_back(fd.orbit);
    }
    std::sort(out.begin(), out.end(), [](const PeriodicOrbit& a, const PeriodicOrbit& b) {
        if (a.period != b.period) return a.period < b.period;
        return a.points[0].s < b.points[0].s;
    });
    return out;
}

HyperbolicityReport hyperbolicity_report(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int n,
                                         const std::vector<double>& eps_values) {
    HyperbolicityReport rep;
    Orbit orb = iterate(poly, f, x0, n, true);
    rep.steps = orb.steps();
    for (double e : eps_values) rep.r_eps.push_back({e, r_of_eps(f, e)});
    ParallelRuns runs = parallel_runs(poly, orb);
    rep.property_A_m = runs.max_closed;
    rep.trailing_run = runs.trailing;
    if (rep.steps == 0) return rep;
    rep.lyapunov_top = orb.cocycles.back().log_alpha / rep.steps;
    // Least-squares slope of log alpha_k against k.
    double mk = 0.0, ml = 0.0;
    for (int k = 1; k <= rep.steps; ++k) {
        mk += k;
        ml += orb.cocycles[k].log_alpha;
    }
    mk /= rep.steps;
    ml /= rep.steps;
    double sxx = 0.0, sxy = 0.0;
    for (int k = 1; k <= rep.steps; ++k) {
        sxx += (k - mk) * (k - mk);
        sxy += (k - mk) * (orb.cocycles[k].log_alpha - ml);
    }
    double slope = sxx > 0.0 ? sxy / sxx : orb.cocycles[1].log_alpha;
    rep.uniform_mu = std::exp(slope);
    double logA = kInf;
    for (int k = 1; k <= rep.steps; ++k) logA = std::min(logA, orb.cocycles[k].log_alpha - k * slope);
    rep.uniform_A = std::exp(logA);
    if (2 * (rep.trailing_run - 1) >= rep.steps) {
        rep.verdict = HyperbolicityVerdict::ParabolicTrapped;
    } else if (rep.uniform_mu > 1.0 && rep.trailing_run <= rep.property_A_m) {
        rep.verdict = HyperbolicityVerdict::UniformlyHyperbolicEvidence;
    } else {
        rep.verdict = HyperbolicityVerdict::Mixed;
    }
    return rep;
}

const char* to_string(HyperbolicityVerdict v) {
    switch (v) {
        case HyperbolicityVerdict::UniformlyHyperbolicEvidence: return "UniformlyHyperbolic-evidence";
        case HyperbolicityVerdict::ParabolicTrapped: return "ParabolicTrapped";
        case HyperbolicityVerdict::Mixed: return "Mixed";
    }
    return "Mixed";
}

}  // namespace polybill
