#include <gtest/gtest.h>

#include <cmath>

#include "polybill/singular.hpp"
#include "test_support.hpp"

using namespace polybill;
using namespace testing_support;

TEST(SingularSet, CurveCounts) {
    EXPECT_EQ(singular_set_s1_plus(equilateral()).size(), 3u);
    EXPECT_EQ(singular_set_s1_plus(square()).size(), 8u);
    EXPECT_EQ(singular_set_s1_plus(pentagon()).size(), 15u);
}

TEST(SingularSet, ConvexCurvesSpanWholeEdges) {
    Polygon p = pentagon();
    for (const auto& c : singular_set_s1_plus(p)) {
        EXPECT_NEAR(c.s_lo, p.vertex_arclength(c.edge), 1e-12);
        EXPECT_NEAR(c.s_hi, p.vertex_arclength(c.edge) + p.edge_length(c.edge), 1e-12);
    }
}

TEST(SingularSet, AnglePointsAtVertex) {
    for (const Polygon& p : {equilateral(), square(), pentagon(), slotted_room()}) {
        for (const auto& c : singular_set_s1_plus(p)) {
            for (int k = 1; k < 10; ++k) {
                double s = c.s_lo + (c.s_hi - c.s_lo) * k / 10.0;
                Vec2 q = p.point_at(s).point;
                Vec2 to = p.vertex(c.vertex) - q;
                Vec2 u = p.tangent(c.edge);
                double expected = std::atan2(to.x * u.x + to.y * u.y, -to.x * u.y + to.y * u.x);
                EXPECT_NEAR(c.theta(s), expected, 1e-12);
                double h = 1e-6;
                EXPECT_NEAR(c.slope(s), (c.theta(s + h) - c.theta(s - h)) / (2 * h), 1e-7);
                EXPECT_LT(c.slope(s), 0.0);
                EXPECT_LE(std::abs(c.slope(s)), 1.0 / c.l + 1e-15);
                FlightOutcome fo = flight(p, {s, c.theta(s)});
                ASSERT_TRUE(std::holds_alternative<Singular>(fo));
                EXPECT_EQ(std::get<Singular>(fo).kind, SingularKind::HitVertex);
            }
        }
    }
}

TEST(SingularSet, NonconvexDomainsMatchVisibility) {
    Polygon room = slotted_room();
    auto curves = singular_set_s1_plus(room);
    ASSERT_FALSE(curves.empty());
    for (const auto& c : curves) {
        for (int k = 1; k < 20; ++k) {
            double s = c.s_lo + (c.s_hi - c.s_lo) * k / 20.0;
            EXPECT_TRUE(segment_inside_sampled(room, room.point_at(s).point, room.vertex(c.vertex), 300));
        }
    }
    // Slot bottoms see only the slot's own vertices, not the far wall.
    for (const auto& c : curves)
        if (c.edge == 2) EXPECT_TRUE(c.vertex == 1 || c.vertex == 4) << c.vertex;
}

TEST(SingularSet, BackwardImageRunsIntoVertex) {
    ReflectionLaw f = ReflectionLaw::linear(0.6);
    Polygon p = pentagon();
    for (const auto& ic : singular_set_s1_minus(p, f)) {
        for (int k = 1; k < 10; ++k) {
            double s = ic.source.s_lo + (ic.source.s_hi - ic.source.s_lo) * k / 10.0;
            EXPECT_DOUBLE_EQ(ic.theta(s), f(-ic.source.theta(s)));
            EXPECT_FALSE(inverse_step(p, f, {s, ic.theta(s)}).has_value());
        }
    }
}

TEST(Pullback, ImagesLandOnForwardCurves) {
    ReflectionLaw f = ReflectionLaw::linear(0.3);
    Polygon p = equilateral();
    auto curves = singular_set_s1_plus(p);
    auto pieces = pullback_singular(p, f, 3, 100);
    int checked = 0;
    for (const auto& piece : pieces) {
        if (piece.generation == 0) continue;
        const auto& c = curves[piece.source];
        for (size_t i = 1; i + 1 < piece.points.size(); ++i) {
            PhasePoint y = piece.points[i];
            for (int k = 0; k < piece.generation; ++k) {
                StepOutcome so = step(p, f, y);
                ASSERT_TRUE(is_regular(so));
                y = std::get<Step>(so).next;
            }
            EXPECT_EQ(p.edge_at(y.s), c.edge);
            EXPECT_NEAR(y.theta, c.theta(y.s), 1e-9);
            ++checked;
        }
    }
    EXPECT_GT(checked, 100);
}

TEST(BranchNumber, ConvexPolygonsGiveTwo) {
    ReflectionLaw f = ReflectionLaw::linear(0.3);
    for (const Polygon& p : {equilateral(), square(), pentagon(), regular_polygon(6)}) {
        PEstimate est = p_of_S(p, f, 1, 100);
        EXPECT_EQ(est.p, 2);
        EXPECT_GE(est.rounds, 3);
    }
}

TEST(BranchNumber, NonconvexAtLeastTwo) {
    PEstimate est = p_of_S(slotted_room(), ReflectionLaw::linear(0.3), 1, 100);
    EXPECT_GE(est.p, 2);
}

TEST(BranchNumber, SmallLawKeepsPiecesDisjoint) {
    ReflectionLaw f = ReflectionLaw::linear(0.05);
    Polygon p = equilateral();
    auto pieces = pullback_singular(p, f, 3, 400);
    EXPECT_GT(pieces.size(), 3u);
    EXPECT_EQ(branch_multiplicity(p, pieces, 1e-7), 2);
    EXPECT_EQ(p_of_S(p, f, 3, 100).p, 2);
}
