#include "polybill/runner.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <system_error>

#include "polybill/analysis.hpp"
#include "polybill/parallel.hpp"
#include "polybill/random.hpp"
#include "polybill/rectangle.hpp"
#include "polybill/regular.hpp"
#include "polybill/serialization.hpp"
#include "polybill/singular.hpp"
#include "polybill/slap.hpp"

namespace polybill {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Context {
    const ExperimentConfig& cfg;
    fs::path dir;
    RunResult result;

    fs::path file(const std::string& name) {
        fs::path p = dir / name;
        result.files.push_back(p);
        return p;
    }
};

std::string fixed(double x, int digits = 6) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

json point_json(PhasePoint x) { return {{"s", x.s}, {"theta", x.theta}}; }

int regular_sides(const ExperimentConfig& cfg) {
    if (cfg.polygon.kind != "regular") throw ConfigError("this command needs a regular polygon");
    return cfg.polygon.sides;
}

// ---- lyapunov ------------------------------------------------------------

void cmd_lyapunov(Context& ctx) {
    const auto& cfg = ctx.cfg;
    Polygon poly = make_polygon(cfg.polygon);
    ReflectionLaw f = make_law(cfg.law);
    if (cfg.n > 1'000'000'000L) throw ConfigError("n is too large");
    auto est = lyapunov_ensemble(poly, f, static_cast<int>(cfg.n), cfg.seeds, cfg.rng_seed);

    CsvWriter csv({"seed", "s0", "theta0", "steps", "singular", "lyapunov", "lyapunov_direct"});
    double sum = 0.0, lo = INFINITY, hi = -INFINITY;
    int used = 0;
    for (std::size_t i = 0; i < est.size(); ++i) {
        auto g = stream_rng(cfg.rng_seed, i);
        PhasePoint x0 = random_phase_point(poly, g);
        const auto& e = est[i];
        csv.row(static_cast<long>(i), x0.s, x0.theta, e.steps, e.singular, e.value, e.direct);
        if (e.steps > 0) {
            sum += e.value;
            lo = std::min(lo, e.value);
            hi = std::max(hi, e.value);
            ++used;
        }
    }
    csv.save(ctx.file("lyapunov.csv"));
    double mean = used ? sum / used : NAN;
    json j = {{"seeds", cfg.seeds}, {"n", cfg.n}, {"used", used}, {"mean", mean}, {"min", used ? lo : NAN},
              {"max", used ? hi : NAN}, {"law", f.name()}, {"lambda", f.lambda()}};
    save_json(ctx.file("lyapunov.json"), j);
    ctx.result.summary = "lyapunov: mean=" + fixed(mean) + " min=" + fixed(used ? lo : NAN) + " seeds=" + std::to_string(used);
}

// ---- histogram -----------------------------------------------------------

void cmd_histogram(Context& ctx) {
    const auto& cfg = ctx.cfg;
    Polygon poly = make_polygon(cfg.polygon);
    ReflectionLaw f = make_law(cfg.law);
    HistogramParams p;
    p.n_orbits = cfg.n_orbits;
    p.n_transient = cfg.n_transient;
    p.n_keep = cfg.n_keep;
    p.grid_s = cfg.grid_s;
    p.grid_theta = cfg.grid_theta;
    p.rng_seed = cfg.rng_seed;
    Histogram2D h = attractor_histogram(poly, f, p);

    CsvWriter csv({"i_s", "i_theta", "s", "theta", "mass"});
    for (int i = 0; i < h.grid_s; ++i)
        for (int k = 0; k < h.grid_theta; ++k)
            if (h.at(i, k) > 0.0) csv.row(i, k, h.s_center(i), h.theta_center(k), h.at(i, k));
    csv.save(ctx.file("histogram.csv"));

    json j = {{"grid", {h.grid_s, h.grid_theta}}, {"reduced", h.reduced}, {"s_max", h.s_max}, {"samples", h.n_samples},
              {"orbits", h.n_orbits}, {"singular_orbits", h.singular_orbits}, {"max_abs_theta", h.max_abs_theta},
              {"band", h.band}, {"support_ok", h.support_ok}, {"tv_halves", h.tv_halves},
              {"nonzero_cells", csv.rows()}};
    save_json(ctx.file("histogram.json"), j);
    ctx.result.summary = "histogram: samples=" + std::to_string(h.n_samples) + " tv=" + fixed(h.tv_halves) +
                         " support=" + (h.support_ok ? "ok" : "violated");
}

// ---- check ---------------------------------------------------------------

json check_acute(const ExperimentConfig& cfg, std::string& verdict) {
    auto r = acute_triangle_criterion(make_polygon(cfg.polygon), make_law(cfg.law));
    verdict = r.holds ? "holds" : "fails";
    return {{"all_acute", r.all_acute}, {"max_angle", r.max_angle}, {"bound", r.bound}, {"lambda", r.lambda},
            {"holds", r.holds}, {"strip_min_theta", r.strip_min_theta}, {"strip_clear", r.strip_clear}};
}

json check_srb(const ExperimentConfig& cfg, std::string& verdict) {
    auto r = srb_hypothesis_check(make_polygon(cfg.polygon), make_law(cfg.law), cfg.m, cfg.resolution);
    verdict = r.satisfied ? "satisfied" : "not satisfied";
    return {{"m", r.m}, {"p_Sm", r.p_Sm}, {"alpha_m_lower", r.alpha_m_lower}, {"argmin", point_json(r.argmin)},
            {"satisfied", r.satisfied}, {"margin", r.margin}, {"resolution", r.resolution},
            {"grid_points", r.grid_points}, {"regular_points", r.regular_points}, {"p_resolution", r.p_resolution},
            {"caveat", r.caveat}};
}

json zero_json(const ZeroMeasureReport& r) {
    return {{"zero1_hypothesis", r.zero1_hypothesis}, {"zero1_gap", r.zero1_gap}, {"zero1_Jbar", r.zero1_Jbar},
            {"zero1_Jbar_below_one", r.zero1_Jbar_below_one}, {"sampled_J_max", r.sampled_J_max},
            {"samples", r.samples}, {"zero2_sup", r.zero2_sup}, {"zero2_hypothesis", r.zero2_hypothesis}};
}

json check_zero1(const ExperimentConfig& cfg, std::string& verdict) {
    auto r = zero_measure_checks(make_polygon(cfg.polygon), make_law(cfg.law), cfg.rng_seed);
    verdict = r.zero1_hypothesis ? "holds" : "fails";
    return zero_json(r);
}

json check_zero2(const ExperimentConfig& cfg, std::string& verdict) {
    auto r = zero_measure_checks(make_polygon(cfg.polygon), make_law(cfg.law), cfg.rng_seed);
    verdict = r.zero2_hypothesis ? "holds" : "fails";
    return zero_json(r);
}

json check_evenN(const ExperimentConfig& cfg, std::string& verdict) {
    auto r = check_evenN_hypotheses(regular_sides(cfg), make_law(cfg.law));
    verdict = r.hypotheses() ? "holds" : "fails";
    return {{"d", r.d}, {"d_ok", r.d_ok}, {"odd", r.odd}, {"increasing", r.increasing},
            {"lambda_le_half", r.lambda_le_half}, {"homogeneity", r.homogeneity},
            {"worst_homogeneity", r.worst_homogeneity}, {"linear_remark", r.linear_remark},
            {"hypotheses", r.hypotheses()}, {"first", {{"s", r.first.s}, {"theta", r.first.theta}}},
            {"second", {{"s", r.second.s}, {"theta", r.second.theta}}}, {"first_in_closure", r.first_in_closure},
            {"key_inclusion", r.key_inclusion}, {"theta_hat", r.theta_hat}, {"printed_lhs", r.printed_lhs},
            {"rhs", r.rhs}, {"printed_holds", r.printed_holds}, {"corrected_lhs", r.corrected_lhs},
            {"corrected_holds", r.corrected_holds}};
}

RectParams rect_params(const ExperimentConfig& cfg) {
    if (cfg.polygon.kind != "rectangle") throw ConfigError("this check needs a rectangle polygon");
    return RectParams{cfg.polygon.h, make_law(cfg.law)};
}

json thresholds_json(const RectThresholds& t) {
    return {{"theta_plus", t.theta_plus},           {"theta_minus", t.theta_minus},
            {"theta_star_plus", t.theta_star_plus}, {"theta_star_minus", t.theta_star_minus},
            {"theta_tilde", t.theta_tilde},         {"m_lambda", t.m_lambda},
            {"b_lambda", t.b_lambda},               {"mu", t.mu}};
}

json check_rect_uh(const ExperimentConfig& cfg, std::string& verdict) {
    RectParams p = rect_params(cfg);
    RectThresholds t = solve_thresholds(p);
    bool uh = check_uh_conditions(p, t);
    verdict = uh ? "holds" : "fails";
    return {{"h", p.h}, {"uh", uh}, {"thresholds", thresholds_json(t)}};
}

json check_rect_parabolic(const ExperimentConfig& cfg, std::string& verdict) {
    RectParams p = rect_params(cfg);
    RectThresholds t = solve_thresholds(p);
    bool par = check_parabolic_conditions(p, t);
    verdict = par ? "holds" : "fails";
    return {{"h", p.h}, {"parabolic", par}, {"thresholds", thresholds_json(t)}};
}

json check_hyperbolicity(const ExperimentConfig& cfg, std::string& verdict) {
    Polygon poly = make_polygon(cfg.polygon);
    auto g = stream_rng(cfg.rng_seed, 0);
    PhasePoint x0 = random_phase_point(poly, g);
    auto r = hyperbolicity_report(poly, make_law(cfg.law), x0, static_cast<int>(std::min(cfg.n, 100'000'000L)));
    verdict = to_string(r.verdict);
    json eps = json::array();
    for (auto [e, re] : r.r_eps) eps.push_back({{"eps", e}, {"r_eps", re}});
    return {{"x0", point_json(x0)},           {"lyapunov_top", r.lyapunov_top}, {"uniform_mu", r.uniform_mu},
            {"uniform_A", r.uniform_A},       {"r_eps", eps},                   {"property_A_m", r.property_A_m},
            {"trailing_run", r.trailing_run}, {"steps", r.steps},               {"verdict", verdict}};
}

using CheckFn = json (*)(const ExperimentConfig&, std::string&);

const std::map<std::string, CheckFn>& check_table() {
    static const std::map<std::string, CheckFn> t = {
        {"acute", check_acute},       {"srb", check_srb},           {"zero1", check_zero1},
        {"zero2", check_zero2},       {"evenN", check_evenN},       {"rect-uh", check_rect_uh},
        {"rect-parabolic", check_rect_parabolic}, {"hyperbolicity", check_hyperbolicity},
    };
    return t;
}

void cmd_check(Context& ctx) {
    const auto& t = check_table();
    auto it = t.find(ctx.cfg.theorem);
    if (it == t.end()) throw ConfigError("unknown check '" + ctx.cfg.theorem + "'; see list-checks");
    std::string verdict;
    json body = it->second(ctx.cfg, verdict);
    std::string statement;
    for (const auto& c : list_checks())
        if (c.name == ctx.cfg.theorem) statement = c.statement;
    json j = {{"check", ctx.cfg.theorem}, {"statement", statement}, {"verdict", verdict}, {"report", body}};
    save_json(ctx.file("check-" + ctx.cfg.theorem + ".json"), j);
    ctx.result.summary = "check " + ctx.cfg.theorem + ": " + verdict;
}

// ---- growth --------------------------------------------------------------

void cmd_growth(Context& ctx) {
    const auto& cfg = ctx.cfg;
    Polygon poly = make_polygon(cfg.polygon);
    ReflectionLaw f = make_law(cfg.law);
    const GammaSpec& gs = cfg.gamma;
    if (gs.edge < 0 || gs.edge >= poly.size()) throw ConfigError("gamma edge out of range");
    if (!(0.0 < gs.from && gs.from < gs.to && gs.to < 1.0)) throw ConfigError("gamma needs 0 < from < to < 1");

    std::vector<double> thetas = gs.thetas;
    if (thetas.empty()) {
        // Random levels inside the strip the attractor lives in, away from its edge.
        double band = 0.8 * kPi * f.lambda() / 2.0;
        for (int k = 0; k < gs.levels; ++k) {
            auto g = stream_rng(cfg.rng_seed, static_cast<std::uint64_t>(k));
            thetas.push_back((2.0 * uniform01(g) - 1.0) * band);
        }
    }
    double s0 = poly.vertex_arclength(gs.edge), len = poly.edge_length(gs.edge);
    int n = static_cast<int>(std::clamp(cfg.n, 0L, 10'000L));

    CsvWriter csv({"theta", "eps", "length"});
    json levels = json::array();
    double slope_sum = 0.0;
    for (double th : thetas) {
        PhasePoint a{s0 + gs.from * len, th}, b{s0 + gs.to * len, th};
        GrowthReport r = growth_check(poly, f, a, b, n, cfg.eps_list, cfg.samples);
        for (std::size_t i = 0; i < r.eps.size(); ++i) csv.row(th, r.eps[i], r.length[i]);
        levels.push_back({{"theta", th},
                          {"slope", r.slope},
                          {"intercept", r.intercept},
                          {"residual", r.residual},
                          {"gamma_length", r.gamma_length},
                          {"samples", r.samples},
                          {"singular_samples", r.singular_samples}});
        slope_sum += r.slope;
    }
    csv.save(ctx.file("growth.csv"));
    double mean = thetas.empty() ? NAN : slope_sum / static_cast<double>(thetas.size());
    save_json(ctx.file("growth.json"), {{"n", n}, {"eps_list", cfg.eps_list}, {"levels", levels}, {"mean_slope", mean}});
    ctx.result.summary = "growth: levels=" + std::to_string(thetas.size()) + " mean_slope=" + fixed(mean);
}

// ---- vertex-connections --------------------------------------------------

void cmd_vertex_connections(Context& ctx) {
    const auto& cfg = ctx.cfg;
    Polygon poly = make_polygon(cfg.polygon);
    auto r = find_vertex_connections(poly, cfg.m, true);
    json found = json::array();
    for (const auto& c : r.found)
        found.push_back({{"from", c.from}, {"to", c.to}, {"itinerary", c.itinerary}, {"order", c.order},
                         {"certified", c.certified}});
    json j = {{"searched_order", r.searched_order}, {"found", found}, {"closest_miss", r.closest_miss},
              {"rejected", r.rejected}};
    if (poly.is_convex()) {
        PEstimate p = p_of_S(poly, make_law(cfg.law), 1, std::max(cfg.resolution, 8));
        j["p_S1"] = p.p;
        j["p_S1_resolution"] = p.resolution;
    }
    save_json(ctx.file("vertex-connections.json"), j);
    ctx.result.summary = "vertex-connections: order<=" + std::to_string(r.searched_order) +
                         " found=" + std::to_string(r.found.size());
}

// ---- rect-scan -----------------------------------------------------------

void cmd_rect_scan(Context& ctx) {
    const auto& cfg = ctx.cfg;
    std::vector<double> sigmas = cfg.sigma_list, hs = cfg.h_list;
    if (sigmas.empty())
        for (int i = 0; i < 20; ++i) sigmas.push_back((i + 0.5) / 20.0);
    if (hs.empty())
        for (int i = 0; i < 20; ++i) hs.push_back((i + 1) / 20.0);

    struct Cell {
        bool ok = false;
        bool uh = false;
        bool parabolic = false;
        RectThresholds t;
    };
    std::vector<Cell> cells(sigmas.size() * hs.size());
    parallel_for(cells.size(), [&](std::size_t idx) {
        double sigma = sigmas[idx / hs.size()], h = hs[idx % hs.size()];
        Cell& c = cells[idx];
        try {
            RectParams p{h, make_law(LawSpec{cfg.law.type, sigma})};
            c.t = solve_thresholds(p);
            c.uh = check_uh_conditions(p, c.t);
            c.parabolic = check_parabolic_conditions(p, c.t);
            c.ok = true;
        } catch (const RectangleError&) {
        } catch (const ConfigError&) {
        }
    });

    CsvWriter csv({"sigma", "h", "ok", "uh", "parabolic", "theta_plus", "theta_star_plus", "theta_tilde", "mu"});
    int n_uh = 0, n_par = 0, n_both = 0, n_bad = 0;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        const Cell& c = cells[idx];
        csv.row(sigmas[idx / hs.size()], hs[idx % hs.size()], c.ok, c.uh, c.parabolic, c.ok ? c.t.theta_plus : NAN,
                c.ok ? c.t.theta_star_plus : NAN, c.ok ? c.t.theta_tilde : NAN, c.ok ? c.t.mu : NAN);
        n_uh += c.uh;
        n_par += c.parabolic;
        n_both += c.uh && c.parabolic;
        n_bad += !c.ok;
    }
    csv.save(ctx.file("rect-scan.csv"));
    ctx.result.summary = "rect-scan: cells=" + std::to_string(cells.size()) + " uh=" + std::to_string(n_uh) +
                         " parabolic=" + std::to_string(n_par) + " both=" + std::to_string(n_both) +
                         " invalid=" + std::to_string(n_bad);
}

// ---- reduced -------------------------------------------------------------

void cmd_reduced(Context& ctx) {
    const auto& cfg = ctx.cfg;
    int d = regular_sides(cfg);
    if (d < 3) throw ConfigError("a regular polygon needs at least 3 sides");
    ReflectionLaw f = make_law(cfg.law);

    struct Sample {
        ReducedPoint x;
        int branch;
    };
    std::vector<std::vector<Sample>> orbits(static_cast<std::size_t>(cfg.n_orbits));
    parallel_for(orbits.size(), [&](std::size_t i) {
        auto g = stream_rng(cfg.rng_seed, i);
        ReducedPoint x{uniform01(g), (uniform01(g) - 0.5) * kPi};
        auto& out = orbits[i];
        for (int k = 0; k < cfg.n_transient + cfg.n_keep; ++k) {
            auto r = reduced_step(d, f, x);
            if (!std::holds_alternative<ReducedStep>(r)) break;
            const auto& st = std::get<ReducedStep>(r);
            x = st.next;
            if (k >= cfg.n_transient) out.push_back({x, st.branch});
        }
    });

    CsvWriter csv({"orbit", "k", "s", "theta", "branch"});
    int truncated = 0;
    for (std::size_t i = 0; i < orbits.size(); ++i) {
        if (static_cast<int>(orbits[i].size()) < cfg.n_keep) ++truncated;
        for (std::size_t k = 0; k < orbits[i].size(); ++k)
            csv.row(static_cast<long>(i), static_cast<long>(k), orbits[i][k].x.s, orbits[i][k].x.theta, orbits[i][k].branch);
    }
    csv.save(ctx.file("reduced.csv"));
    ctx.result.summary = "reduced: d=" + std::to_string(d) + " points=" + std::to_string(csv.rows()) +
                         " singular_orbits=" + std::to_string(truncated);
}

// ---- list-checks ---------------------------------------------------------

void cmd_list_checks(Context& ctx) {
    json j = json::array();
    for (const auto& c : list_checks()) j.push_back({{"name", c.name}, {"statement", c.statement}});
    save_json(ctx.file("checks.json"), j);
    ctx.result.summary = "list-checks: " + std::to_string(list_checks().size()) + " checks";
}

using CommandFn = void (*)(Context&);

const std::map<std::string, CommandFn>& command_table() {
    static const std::map<std::string, CommandFn> t = {
        {"lyapunov", cmd_lyapunov},   {"histogram", cmd_histogram},
        {"check", cmd_check},         {"growth", cmd_growth},
        {"vertex-connections", cmd_vertex_connections},
        {"rect-scan", cmd_rect_scan}, {"reduced", cmd_reduced},
        {"list-checks", cmd_list_checks},
    };
    return t;
}

}  // namespace

const std::vector<CommandInfo>& list_commands() {
    static const std::vector<CommandInfo> c = {
        {"lyapunov", "top Lyapunov exponent from the derivative cocycle along Lebesgue-random orbits, one row per seed"},
        {"histogram", "occupation histogram of the attractor in (s, theta), in reduced coordinates for regular polygons"},
        {"check", "evaluates one hypothesis checker named by --theorem (see list-checks) and writes a JSON report"},
        {"growth", "measure of a horizontal segment whose n-th iterate comes eps-close to the singular set, with the log-log slope"},
        {"vertex-connections", "certified search for orthogonal vertex connections of order up to m, and p(S1+) for convex tables"},
        {"rect-scan", "uniform-hyperbolicity and parabolic-trapping conditions for rectangles over a (sigma, h) grid"},
        {"reduced", "orbits of the reduced map of a regular polygon, for phase portraits"},
        {"list-checks", "catalog of hypothesis checkers"},
    };
    return c;
}

const std::vector<CheckInfo>& list_checks() {
    static const std::vector<CheckInfo> c = {
        {"acute", "acute triangle with lambda(f) < (2/pi) min_i (pi/2 - phi_i): generalized hyperbolic attractor with "
                  "countably many ergodic SRB measures"},
        {"srb", "no parallel sides facing each other and p(S_m^+) < alpha(Phi^m) for some m: countably many ergodic "
                "SRB measures (alpha estimated on a grid)"},
        {"zero1", "|pi - delta(Li, Lj)| != pi/2 for all sides seeing each other: the attractor has zero Lebesgue measure "
                  "for lambda small; reports the Jacobian bound as the smallness witness"},
        {"zero2", "sup |f'(theta)| / cos(theta) < 1: the attractor has zero Lebesgue measure"},
        {"evenN", "regular d-gon, d even, f odd with f' > 0, lambda <= 1/2 and f(delta 2pi/d) <= delta f(2pi/d): orbits with "
                  "enough parallel collisions fall into the basin of the period-two set"},
        {"rect-uh", "rectangle, f' > 0 and theta_tilde > max(-theta_star_minus, theta_star_plus): complete sequences have "
                    "bounded length and every invariant set off the trapping set is uniformly hyperbolic"},
        {"rect-parabolic", "rectangle, f' > 0, h <= tan(theta_tilde), f1(theta_star_plus) < theta_minus and "
                           "theta_plus < f1(theta_star_minus): almost every orbit is attracted by the period-two set"},
        {"hyperbolicity", "Lyapunov exponent, exponential growth of alpha_n and Property (A) along one orbit"},
    };
    return c;
}

RunResult run(const ExperimentConfig& cfg) {
    const auto& t = command_table();
    auto it = t.find(cfg.command);
    if (it == t.end()) throw ConfigError("unknown command '" + cfg.command + "'");

    fs::path dir = cfg.output.empty() ? fs::path(".") : fs::path(cfg.output);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());

    Context ctx{cfg, dir, {}};
    try {
        it->second(ctx);
    } catch (const AnalysisError& e) {
        throw ConfigError(e.what());
    } catch (const RectangleError& e) {
        throw ConfigError(e.what());
    } catch (const GeometryError& e) {
        throw ConfigError(e.what());
    } catch (const ReflectionError& e) {
        throw ConfigError(e.what());
    }
    return ctx.result;
}

}  // namespace polybill
