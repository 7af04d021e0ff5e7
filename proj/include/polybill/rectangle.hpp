#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "polybill/billiard.hpp"

namespace polybill {

class RectangleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Rectangle with long sides of length 1 and short sides of length h, and an increasing law.
struct RectParams {
    double h = 1.0;
    ReflectionLaw f = ReflectionLaw::linear(0.5);
};

// f1 = -f; angle after a bounce between parallel sides.
double f1(const ReflectionLaw& f, double theta);
// f2(theta) = f(sgn(theta) pi/2 - theta); angle after a bounce at an adjacent side.
// Throws RectangleError at theta = 0.
double f2(const ReflectionLaw& f, double theta);

// F(theta) = sum_{n>=0} tan|f1^n(theta)|, with the truncated tail bounded geometrically.
double trap_series(const ReflectionLaw& f, double theta);

struct RectThresholds {
    double theta_plus = 0.0;   // fixed points of f2
    double theta_minus = 0.0;
    double theta_star_plus = 0.0;   // solutions of F = 1/h
    double theta_star_minus = 0.0;
    double theta_tilde = 0.0;
    double m_lambda = 0.0;
    double b_lambda = 0.0;
    double mu = 0.0;
};

RectThresholds solve_thresholds(const RectParams& params);

// theta_tilde > max(-theta_star_minus, theta_star_plus).
bool check_uh_conditions(const RectParams& params, const RectThresholds& t);
bool check_uh_conditions(const RectParams& params);
// h <= tan(theta_tilde), f1(theta_star_plus) < theta_minus and theta_plus < f1(theta_star_minus).
bool check_parabolic_conditions(const RectParams& params, const RectThresholds& t);
bool check_parabolic_conditions(const RectParams& params);

enum class RectVerdict { TrappedToP, HyperbolicCandidate, Undecided };

// Collisions x_start .. x_{start+length}: the first `length` on a pair of parallel sides,
// the last on a side adjacent to them.
struct RectBlock {
    int start = 0;
    int length = 0;
    double log_Lambda = 0.0;  // sum of log rho over the block's collisions after the first
    bool bound_holds = false;  // Lambda >= mu^length
    double angle_residual = 0.0;  // | |theta_bar_end + theta_{end-1}| - pi/2 |
};

struct RectClassification {
    RectVerdict verdict = RectVerdict::Undecided;
    bool singular = false;  // a vertex was hit before a verdict
    int steps = 0;
    int trapped_at = -1;    // collision after which the orbit stays between two parallel sides
    std::vector<RectBlock> blocks;  // blocks starting at collision 1 or later
    int block_violations = 0;
    double max_angle_residual = 0.0;
    int max_complete_length = 0;    // longest run between two adjacent bounces
    int last_run = 0;               // parallel bounces since the last adjacent bounce
    // Trapping lemma at starts of long-side runs: applications, and disagreements
    // with the exact lateral-travel test.
    int lemma_trapped = 0;
    int lemma_disagreements = 0;
    // Adjacent bounces from |theta| < pi lambda / 2 whose outgoing angle fell below theta_tilde.
    int adjacent_lemma_violations = 0;
};

// Exact test that an orbit leaving side `edge` of the rectangle with angle theta stays
// between that side and the opposite one forever. Empty when too close to call.
std::optional<bool> stays_between_parallel_sides(const Polygon& rect, const ReflectionLaw& f, PhasePoint x);

// Iterates the orbit of x0 on rectangle(h), splits it into blocks and checks the block bound.
// Blocks are recorded up to `max_blocks`; counters cover the whole orbit.
RectClassification classify_orbit(const RectParams& params, PhasePoint x0, int n_max = 1000000, int max_blocks = 10000);
RectClassification classify_orbit(const RectParams& params, const RectThresholds& t, PhasePoint x0, int n_max = 1000000,
                                  int max_blocks = 10000);

}  // namespace polybill
