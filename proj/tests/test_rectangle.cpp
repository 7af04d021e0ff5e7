#include <gtest/gtest.h>

#include <cmath>

#include "polybill/rectangle.hpp"
#include "test_support.hpp"

using namespace polybill;
using namespace testing_support;

TEST(RectangleMaps, LinearLawValues) {
    ReflectionLaw f = ReflectionLaw::linear(0.4);
    EXPECT_DOUBLE_EQ(f1(f, 0.3), -0.4 * 0.3);
    EXPECT_NEAR(f2(f, 0.3), 0.4 * (kPi / 2 - 0.3), 1e-15);
    EXPECT_NEAR(f2(f, -0.3), 0.4 * (-kPi / 2 + 0.3), 1e-15);
    EXPECT_THROW(f2(f, 0.0), RectangleError);
}

TEST(RectangleMaps, StepAnglesAgreeWithBilliard) {
    Rng rng(7);
    for (double sigma : {0.3, 0.7}) {
        ReflectionLaw f = ReflectionLaw::linear(sigma);
        for (double h : {1.0, 0.6}) {
            Polygon rect = rectangle(h);
            for (int k = 0; k < 2000; ++k) {
                PhasePoint x = random_point(rect, rng);
                StepOutcome o = step(rect, f, x);
                if (!is_regular(o)) continue;
                const Step& st = std::get<Step>(o);
                bool parallel = rect.wrap(st.flight.edge_to - st.flight.edge_from) == 2;
                double expected = parallel ? f1(f, x.theta) : f2(f, x.theta);
                EXPECT_NEAR(st.next.theta, expected, 1e-12);
            }
        }
    }
}

TEST(RectangleMaps, F2Properties) {
    for (const ReflectionLaw& f : {ReflectionLaw::linear(0.6), ReflectionLaw::sine(0.8)}) {
        double lam = f.lambda();
        for (double sign : {1.0, -1.0}) {
            double prev = f2(f, sign * 1e-6), prev2 = f2(f, f2(f, sign * 1e-6));
            for (int i = 1; i < 400; ++i) {
                double a = sign * (1e-6 + i * (kPi / 2 - 1e-6) / 400);
                double b = a - sign * 1e-3;
                double v = f2(f, a);
                if (sign > 0) EXPECT_LT(v, prev);
                else EXPECT_GT(v, prev);
                EXPECT_LT(std::abs(v - f2(f, b)), lam * 1e-3 + 1e-15);
                double w = f2(f, f2(f, a));
                if (sign > 0) EXPECT_GE(w, prev2);
                else EXPECT_LE(w, prev2);
                prev = v;
                prev2 = w;
            }
        }
    }
}

TEST(Thresholds, LinearLawClosedForms) {
    for (double sigma : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        RectParams p{1.0, ReflectionLaw::linear(sigma)};
        RectThresholds t = solve_thresholds(p);
        EXPECT_NEAR(t.theta_plus, sigma * kPi / (2 * (1 + sigma)), 1e-12);
        EXPECT_NEAR(t.theta_minus, -t.theta_plus, 1e-12);
        EXPECT_NEAR(t.theta_star_minus, -t.theta_star_plus, 1e-12);
        EXPECT_NEAR(t.theta_tilde, sigma * (kPi / 2 - sigma * kPi / 2), 1e-12);
        double m = 2.0 / std::log(sigma) * std::log(2.0 / kPi * std::cos(kPi * sigma / 2));
        EXPECT_NEAR(t.m_lambda, m, 1e-12);
        // rho increases with |theta| for linear laws, so r(eps) = rho(eps).
        double eps = kPi * (1 - sigma) / 2;
        EXPECT_NEAR(t.b_lambda, std::cos(sigma * eps) / std::cos(eps), 1e-10);
        EXPECT_GT(t.mu, 1.0);
        EXPECT_LE(t.mu, 1.0 / std::sqrt(sigma) + 1e-15);
    }
}

TEST(Thresholds, InvariantsForSeveralLaws) {
    for (const ReflectionLaw& f : {ReflectionLaw::linear(0.45), ReflectionLaw::sine(0.7),
                                   ReflectionLaw::custom([](double t) { return 0.3 * t + 0.05 * t * t; },
                                                         [](double t) { return 0.3 + 0.1 * t; }, 0.3 + 0.05 * kPi, false)}) {
        for (double h : {0.2, 0.5, 1.0}) {
            RectParams p{h, f};
            RectThresholds t = solve_thresholds(p);
            EXPECT_NEAR(f2(f, t.theta_plus), t.theta_plus, 1e-12);
            EXPECT_NEAR(f2(f, t.theta_minus), t.theta_minus, 1e-12);
            EXPECT_LT(t.theta_minus, 0.0);
            EXPECT_GT(t.theta_plus, 0.0);
            EXPECT_NEAR(trap_series(f, t.theta_star_plus), 1.0 / h, 1e-10);
            EXPECT_NEAR(trap_series(f, t.theta_star_minus), 1.0 / h, 1e-10);
            EXPECT_GT(t.mu, 1.0);
        }
    }
}

TEST(Thresholds, SeriesMatchesDirectSum) {
    ReflectionLaw f = ReflectionLaw::linear(0.6);
    for (double th : {-1.2, -0.1, 0.4, 1.3}) {
        double sum = 0.0, x = th;
        for (int n = 0; n < 400; ++n, x *= -0.6) sum += std::tan(std::abs(x));
        EXPECT_NEAR(trap_series(f, th), sum, 1e-14 * sum);
    }
}

TEST(Thresholds, RejectsDecreasingLaw) {
    ReflectionLaw andreev = ReflectionLaw::custom([](double t) { return -0.5 * t; }, [](double) { return -0.5; }, 0.5, true);
    EXPECT_THROW(solve_thresholds({1.0, andreev}), RectangleError);
}

TEST(Conditions, UniformlyHyperbolicRegime) {
    EXPECT_TRUE(check_uh_conditions({1.0, ReflectionLaw::linear(0.7)}));
    EXPECT_FALSE(check_parabolic_conditions({1.0, ReflectionLaw::linear(0.7)}));
    // sigma h > 2/pi is sufficient.
    for (int i = 1; i < 20; ++i)
        for (int j = 1; j <= 20; ++j) {
            double sigma = i / 20.0, h = j / 20.0;
            if (sigma * h > 2.0 / kPi + 1e-9) EXPECT_TRUE(check_uh_conditions({h, ReflectionLaw::linear(sigma)})) << sigma << " " << h;
        }
}

TEST(Conditions, SmallSigmaSquare) {
    RectParams p{1.0, ReflectionLaw::linear(0.3)};
    RectThresholds t = solve_thresholds(p);
    EXPECT_LT(0.3 * 1.0, 2.0 / kPi);
    // The direct inequality fails here: theta_tilde is below theta_star.
    EXPECT_LT(t.theta_tilde, t.theta_star_plus);
    EXPECT_FALSE(check_uh_conditions(p, t));
}

TEST(Conditions, ThinRectanglesLoseUniformHyperbolicity) {
    ReflectionLaw f = ReflectionLaw::linear(0.5);
    double prev = 0.0;
    for (double h : {1.0, 0.5, 0.2, 0.1, 0.05}) {
        RectThresholds t = solve_thresholds({h, f});
        EXPECT_GT(t.theta_star_plus, prev);
        prev = t.theta_star_plus;
    }
    EXPECT_FALSE(check_uh_conditions({0.05, f}));
}

TEST(Conditions, ParabolicForSmallHeight) {
    for (double sigma : {0.2, 0.5, 0.8}) {
        EXPECT_TRUE(check_parabolic_conditions({0.01, ReflectionLaw::linear(sigma)})) << sigma;
    }
}

TEST(Conditions, NeverBothTrue) {
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            RectParams p{0.05 + 0.95 * j / 19.0, ReflectionLaw::linear(0.05 + 0.9 * i / 19.0)};
            RectThresholds t = solve_thresholds(p);
            EXPECT_FALSE(check_uh_conditions(p, t) && check_parabolic_conditions(p, t));
        }
}

TEST(Classify, ZeroAngleIsTrapped) {
    RectClassification c = classify_orbit({1.0, ReflectionLaw::linear(0.7)}, {0.3, 0.0}, 100);
    EXPECT_EQ(c.verdict, RectVerdict::TrappedToP);
    EXPECT_EQ(c.trapped_at, 0);
}

TEST(Classify, TravelTestMatchesSimulation) {
    // Whenever the travel test answers, a long simulation agrees.
    Rng rng(13);
    ReflectionLaw f = ReflectionLaw::linear(0.5);
    Polygon rect = rectangle(0.4);
    int decided = 0;
    for (int k = 0; k < 500; ++k) {
        PhasePoint x = random_point(rect, rng, 1.0);
        auto verdict = stays_between_parallel_sides(rect, f, x);
        if (!verdict) continue;
        ++decided;
        int e0 = rect.edge_at(x.s);
        bool stayed = true;
        PhasePoint y = x;
        for (int i = 0; i < 200; ++i) {
            StepOutcome o = step(rect, f, y);
            if (!is_regular(o)) {
                stayed = false;
                break;
            }
            int e = std::get<Step>(o).flight.edge_to;
            if (e != e0 && e != rect.wrap(e0 + 2)) {
                stayed = false;
                break;
            }
            y = std::get<Step>(o).next;
        }
        EXPECT_EQ(*verdict, stayed) << x.s << " " << x.theta;
    }
    EXPECT_GT(decided, 480);
}

TEST(Classify, HyperbolicRegimeBlocks) {
    RectParams p{1.0, ReflectionLaw::linear(0.7)};
    RectThresholds t = solve_thresholds(p);
    Polygon rect = rectangle(1.0);
    Rng rng(19);
    int hyperbolic = 0;
    int max_len = 0;
    for (int k = 0; k < 100; ++k) {
        RectClassification c = classify_orbit(p, t, random_point(rect, rng), 5000);
        EXPECT_EQ(c.block_violations, 0);
        EXPECT_LT(c.max_angle_residual, 1e-10);
        EXPECT_EQ(c.lemma_disagreements, 0);
        EXPECT_EQ(c.adjacent_lemma_violations, 0);
        if (c.verdict == RectVerdict::HyperbolicCandidate) {
            ++hyperbolic;
            max_len = std::max(max_len, c.max_complete_length);
        }
    }
    EXPECT_GT(hyperbolic, 50);
    EXPECT_LE(max_len, 10);
}

TEST(Classify, ParabolicRegimeTraps) {
    RectParams p{0.02, ReflectionLaw::linear(0.3)};
    RectThresholds t = solve_thresholds(p);
    ASSERT_TRUE(check_parabolic_conditions(p, t));
    Polygon rect = rectangle(0.02);
    Rng rng(21);
    for (int k = 0; k < 200; ++k) {
        RectClassification c = classify_orbit(p, t, random_point(rect, rng), 100000);
        if (c.singular) continue;
        EXPECT_EQ(c.verdict, RectVerdict::TrappedToP);
        EXPECT_EQ(c.block_violations, 0);
        EXPECT_EQ(c.lemma_disagreements, 0);
    }
}

TEST(Classify, DecreasingLawOrbitsGetTrapped) {
    ReflectionLaw andreev = ReflectionLaw::custom([](double t) { return -0.5 * t; }, [](double) { return -0.5; }, 0.5, true);
    Polygon rect = rectangle(0.7);
    Rng rng(37);
    for (int k = 0; k < 200; ++k) {
        PhasePoint x = random_point(rect, rng);
        bool trapped = false;
        for (int i = 0; i < 2000 && !trapped; ++i) {
            if (stays_between_parallel_sides(rect, andreev, x) == true) trapped = true;
            StepOutcome o = step(rect, andreev, x);
            if (!is_regular(o)) break;
            x = std::get<Step>(o).next;
        }
        EXPECT_TRUE(trapped) << k;
    }
}
