#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "polybill/billiard.hpp"
#include "polybill/singular.hpp"

namespace polybill {

enum class AnalysisErrorKind {
    EpsTooLarge,
    SingularBeforeDepth,
    NotATriangle,
    ParallelFacingSides,
    GammaNotHorizontal,
    AllOrbitsSingular,
};

class AnalysisError : public std::runtime_error {
public:
    AnalysisError(AnalysisErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    AnalysisErrorKind kind() const { return kind_; }

private:
    AnalysisErrorKind kind_;
};

// True when the flight joins two parallel sides.
bool parallel_transition(const Polygon& poly, const Flight& fl);

// Top Lyapunov exponent along one orbit, from the derivative cocycle.
struct LyapunovEstimate {
    double value = 0.0;   // (1/n) log alpha_n through the running sum of log rho
    double direct = 0.0;  // (1/n) log alpha_n from the product of cosine ratios
    int steps = 0;        // n; smaller than requested when the orbit hit a vertex
    bool singular = false;
};

LyapunovEstimate lyapunov_top(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int n);

// One estimate per seed, each from a Lebesgue-random start drawn from stream (rng_seed, seed).
std::vector<LyapunovEstimate> lyapunov_ensemble(const Polygon& poly, const ReflectionLaw& f, int n, int seeds,
                                                std::uint64_t rng_seed);

// Longest run of consecutive collisions between parallel sides, counted in collisions
// (1 when there are none). The trailing run is the one still open at the end of the orbit.
struct ParallelRuns {
    int max_closed = 1;
    int trailing = 1;
};

ParallelRuns parallel_runs(const Polygon& poly, const Orbit& orbit);

// Delta: half the smallest |pi - delta(Li, Lj)| over non-parallel sides that see each other.
double min_delta(const Polygon& poly);

struct UniformBoundReport {
    bool applicable = false;  // the orbit has a bounded parallel run no longer than m
    int m = 1;
    ParallelRuns runs;
    double Delta = 0.0;
    double eps = 0.0;
    double r_eps = 1.0;
    int pair_checks = 0;
    int pair_violations = 0;
    int bound_checks = 0;
    int bound_violations = 0;
    double worst_margin = 0.0;  // min over n of log Lambda_n minus the log of the bound

    bool passed() const { return applicable && pair_violations == 0 && bound_violations == 0; }
};

// Checks Lambda_n(x_1) >= r(eps)^((n-m-1)/(m+2)) for every n along the orbit, and
// rho(theta_bar_i) rho(theta_bar_{i+1}) >= r(eps) at consecutive collisions on non-parallel sides.
// m <= 0 uses the longest closed run of the orbit. Throws EpsTooLarge unless eps < Delta.
UniformBoundReport uniform_bound_check(const Polygon& poly, const ReflectionLaw& f, const Orbit& orbit, double eps, int m = 0);

// Direction E(x0) = lim D Phi^{-n}(x_n) V(x_n), in (s, theta) components.
struct UnstableDirection {
    Vec2 direction;                // unit vector (-g, 1) / |(-g, 1)|
    double gamma_over_alpha = 0.0;  // g = gamma_depth / alpha_depth
    double truncation_bound = 0.0;  // bound on |g - lim g|
    int depth = 0;
};

// Throws SingularBeforeDepth when the orbit hits a vertex within depth steps.
UnstableDirection unstable_direction(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int depth);

struct AcuteTriangleReport {
    bool all_acute = false;
    double max_angle = 0.0;
    double bound = 0.0;  // (2/pi) min_i (pi/2 - phi_i)
    double lambda = 0.0;
    bool holds = false;
    // Smallest |theta| of S_1^+ on the vertical lines through the vertexes; the strip
    // |theta| < pi lambda / 2 misses S_1^+ there when this exceeds pi lambda / 2.
    double strip_min_theta = 0.0;
    bool strip_clear = false;
};

// Throws NotATriangle for polygons with other than three sides.
AcuteTriangleReport acute_triangle_criterion(const Polygon& poly, const ReflectionLaw& f);

// Grid estimate of inf alpha_m over regular points of the strip |theta| < pi lambda / 2.
struct AlphaInfimum {
    double value = 0.0;
    PhasePoint argmin;
    long grid_points = 0;
    long regular_points = 0;
};

AlphaInfimum alpha_m_infimum(const Polygon& poly, const ReflectionLaw& f, int m, int resolution);

struct SRBHypothesisReport {
    int m = 0;
    int p_Sm = 0;
    double alpha_m_lower = 0.0;
    PhasePoint argmin;
    bool satisfied = false;  // alpha_m_lower > margin * p_Sm
    double margin = 1.1;
    int resolution = 0;
    long grid_points = 0;
    long regular_points = 0;
    int p_resolution = 0;
    std::string caveat;
};

// Throws ParallelFacingSides when the polygon has period-two orbits.
SRBHypothesisReport srb_hypothesis_check(const Polygon& poly, const ReflectionLaw& f, int m, int resolution);

// Distance in the (s, theta) metric from x to the vertical lines through the vertexes and to S_1^+.
double distance_to_singular(const Polygon& poly, const std::vector<SingularCurve>& curves, PhasePoint x);

struct GrowthReport {
    std::vector<double> eps;
    std::vector<double> length;  // length of the part of Gamma whose n-th iterate is eps-close
    double slope = 0.0;          // least squares on log length against log eps
    double intercept = 0.0;
    double residual = 0.0;       // root mean square of the log residuals
    double gamma_length = 0.0;
    int samples = 0;
    int singular_samples = 0;
    int n = 0;
};

// Gamma is the horizontal segment from a to b on one side. Throws GammaNotHorizontal
// when the ends have different angles or lie on different sides.
GrowthReport growth_check(const Polygon& poly, const ReflectionLaw& f, PhasePoint a, PhasePoint b, int n,
                          const std::vector<double>& eps_list, int samples = 1 << 20);

struct HistogramParams {
    int n_orbits = 64;
    int n_transient = 1000;
    int n_keep = 10000;
    int grid_s = 512;
    int grid_theta = 512;
    std::uint64_t rng_seed = 1;
};

struct Histogram2D {
    int grid_s = 0;
    int grid_theta = 0;
    bool reduced = false;  // s measured along one side, as a fraction of its length
    double s_max = 0.0;
    std::vector<double> mass;  // row-major, index i_s * grid_theta + i_theta
    long n_samples = 0;
    int n_transient = 0;
    int n_orbits = 0;
    int singular_orbits = 0;
    double max_abs_theta = 0.0;
    double band = 0.0;         // pi lambda / 2
    bool support_ok = false;   // max_abs_theta below band plus one cell
    double tv_halves = 0.0;    // total variation between even and odd orbit ensembles

    double at(int i_s, int i_theta) const { return mass[static_cast<std::size_t>(i_s) * grid_theta + i_theta]; }
    double theta_center(int i_theta) const;
    double s_center(int i_s) const;
};

bool is_regular_polygon(const Polygon& poly);

// Throws AllOrbitsSingular when no orbit survives the transient.
Histogram2D attractor_histogram(const Polygon& poly, const ReflectionLaw& f, const HistogramParams& params);

struct ZeroMeasureReport {
    bool zero1_hypothesis = false;
    double zero1_gap = 0.0;  // min over seeing pairs of | |pi - delta| - pi/2 |
    double zero1_Jbar = 0.0;  // sup of lambda / |cos(pi - delta - theta)| over |theta| <= pi lambda / 2
    bool zero1_Jbar_below_one = false;
    double sampled_J_max = 0.0;  // Jacobian over attractor samples
    long samples = 0;
    double zero2_sup = 0.0;  // sup |f'| / cos
    bool zero2_hypothesis = false;
};

ZeroMeasureReport zero_measure_checks(const Polygon& poly, const ReflectionLaw& f, std::uint64_t rng_seed = 1);

struct PeriodicOrbit {
    std::vector<PhasePoint> points;
    int period = 0;
    double alpha = 0.0;  // alpha_q at points[0]
    double zeta = 0.0;   // max rho(theta_bar_i) over the period
    double residual = 0.0;
};

// Periodic orbits of period at most q_max found by damped Newton on Phi^q(x) - x from a
// seed grid of the strip |theta| < pi lambda / 2. One entry per orbit.
std::vector<PeriodicOrbit> find_periodic_orbits(const Polygon& poly, const ReflectionLaw& f, int q_max = 12,
                                                int seeds_per_side = 12);

enum class HyperbolicityVerdict { UniformlyHyperbolicEvidence, ParabolicTrapped, Mixed };

struct HyperbolicityReport {
    double lyapunov_top = 0.0;
    double uniform_mu = 0.0;  // exp of the fitted slope of log alpha_n
    double uniform_A = 0.0;   // min_n alpha_n / mu^n
    std::vector<std::pair<double, double>> r_eps;
    int property_A_m = 1;
    int trailing_run = 1;
    int steps = 0;
    HyperbolicityVerdict verdict = HyperbolicityVerdict::Mixed;
};

HyperbolicityReport hyperbolicity_report(const Polygon& poly, const ReflectionLaw& f, PhasePoint x0, int n,
                                         const std::vector<double>& eps_values = {0.05, 0.1, 0.2, 0.4});

const char* to_string(HyperbolicityVerdict v);

}  // namespace polybill
