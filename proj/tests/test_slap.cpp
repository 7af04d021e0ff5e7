#include <gtest/gtest.h>

#include <cmath>

#include "polybill/slap.hpp"
#include "test_support.hpp"

using namespace polybill;
using namespace testing_support;

namespace {

Polygon l_shape(double tilt = 0.0) {
    return Polygon({{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {tilt, 2}});
}

// Star-shaped polygon with random radii around the origin.
Polygon random_star(Rng& rng, int n) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * kPi * (i + rng.uniform(-0.3, 0.3)) / n;
        double r = rng.uniform(0.5, 1.5);
        pts.push_back({r * std::cos(a), r * std::sin(a)});
    }
    return Polygon(pts);
}

// Angle between the lines supporting two sides, folded into [0, pi/2].
double fold_angle(const Polygon& poly, int i, int j) {
    Vec2 a = poly.tangent(i), b = poly.tangent(j);
    double ang = std::acos(std::clamp(std::abs(dot(a, b)), 0.0, 1.0));
    return ang;
}

}  // namespace

TEST(SlapStep, SquareGoesStraightAcross) {
    Polygon sq = square();
    auto r = slap_step(sq, 0.3);
    ASSERT_TRUE(std::holds_alternative<double>(r));
    BoundaryPoint bp = sq.point_at(std::get<double>(r));
    EXPECT_NEAR(bp.point.x, 0.3, 1e-12);
    EXPECT_NEAR(bp.point.y, 1.0, 1e-12);
}

TEST(SlapStep, TriangleVertexesAreFixed) {
    Polygon tri = equilateral();
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        auto r = slap_step(tri, 1.0 - eps);
        ASSERT_TRUE(std::holds_alternative<double>(r));
        EXPECT_NEAR(std::get<double>(r), 1.0, 3.0 * eps);
    }
    SlapOrbit orb = slap_orbit(tri, 1.0, 5);
    EXPECT_EQ(orb.termination, SlapTermination::FixedAtAcuteVertex);
}

TEST(SlapStep, PentagonLandsOnNormalRay) {
    Polygon pent = pentagon();
    for (int e = 0; e < 5; ++e) {
        double s = pent.vertex_arclength(e) + 0.3;
        auto r = slap_step(pent, s);
        ASSERT_TRUE(std::holds_alternative<double>(r));
        Vec2 start = pent.point_at(s).point;
        Vec2 end = pent.point_at(std::get<double>(r)).point;
        EXPECT_LT(boundary_distance(pent, end), 1e-12);
        EXPECT_NEAR(cross(end - start, pent.inward_normal(e)), 0.0, 1e-12);
        EXPECT_GT(dot(end - start, pent.inward_normal(e)), 0.0);
        EXPECT_TRUE(segment_inside_sampled(pent, start, end));
    }
}

TEST(SlapStep, AgreesWithBilliardAtZeroAngle) {
    ReflectionLaw slap = ReflectionLaw::slap();
    Rng rng(11);
    for (const Polygon& poly : {pentagon(), regular_polygon(6), slotted_room(), l_shape()}) {
        for (int e = 0; e < poly.size(); ++e) {
            for (int k = 0; k < 1000; ++k) {
                double s = poly.vertex_arclength(e) + poly.edge_length(e) * rng.uniform(0.001, 0.999);
                auto a = slap_step(poly, s);
                StepOutcome b = step(poly, slap, {s, 0.0});
                ASSERT_EQ(std::holds_alternative<double>(a), is_regular(b));
                if (is_regular(b)) {
                    EXPECT_NEAR(std::get<double>(a), std::get<Step>(b).next.s, 1e-12);
                    EXPECT_EQ(std::get<Step>(b).next.theta, 0.0);
                }
            }
        }
    }
}

TEST(SlapStep, BranchSlopeIsSecantOfLineAngle) {
    Rng rng(5);
    for (const Polygon& poly : {equilateral(), pentagon(), regular_polygon(7), l_shape()}) {
        for (int k = 0; k < 200; ++k) {
            int e = rng.integer(0, poly.size() - 1);
            double s = poly.vertex_arclength(e) + poly.edge_length(e) * rng.uniform(0.05, 0.95);
            const double h = 1e-7;
            auto a = slap_step(poly, s - h), b = slap_step(poly, s + h), c = slap_step(poly, s);
            if (!std::holds_alternative<double>(a) || !std::holds_alternative<double>(b) || !std::holds_alternative<double>(c)) continue;
            int to_a = poly.edge_at(std::get<double>(a)), to_b = poly.edge_at(std::get<double>(b));
            int to = poly.edge_at(std::get<double>(c));
            if (to_a != to || to_b != to) continue;
            double slope = std::abs(std::get<double>(b) - std::get<double>(a)) / (2 * h);
            EXPECT_NEAR(slope, 1.0 / std::cos(fold_angle(poly, e, to)), 1e-6 * slope);
        }
    }
}

TEST(SlapExpansion, KnownPolygons) {
    EXPECT_DOUBLE_EQ(slap_expansion(square()), 1.0);
    EXPECT_NEAR(slap_expansion(equilateral()), 2.0, 1e-12);
    EXPECT_NEAR(slap_expansion(pentagon()), 1.0 / std::cos(kPi / 5), 1e-12);
    EXPECT_NEAR(slap_expansion(pentagon()), 1.2360679775, 1e-9);
}

TEST(SlapExpansion, MatchesPairwiseOracle) {
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        Polygon poly = random_star(rng, 5 + k % 4);
        double oracle = std::numeric_limits<double>::infinity();
        for (int i = 0; i < poly.size(); ++i)
            for (int j = i + 1; j < poly.size(); ++j)
                if (sides_see_each_other(poly, i, j)) oracle = std::min(oracle, 1.0 / std::cos(fold_angle(poly, i, j)));
        EXPECT_NEAR(slap_expansion(poly), oracle, 1e-9 * oracle);
        EXPECT_GE(slap_expansion(poly), 1.0);
    }
}

TEST(VertexConnections, SquareHasThem) {
    VertexConnectionReport rep = find_vertex_connections(square(), 5);
    ASSERT_FALSE(rep.found.empty());
    for (const auto& c : rep.found) {
        EXPECT_TRUE(c.certified);
        EXPECT_NE(c.from, c.to);
        EXPECT_LE(c.order, 5);
    }
    EXPECT_EQ(rep.rejected, 0);
}

TEST(VertexConnections, PentagonHasNone) {
    VertexConnectionReport rep = find_vertex_connections(pentagon(), 30);
    EXPECT_TRUE(rep.found.empty());
    EXPECT_EQ(rep.rejected, 0);
    EXPECT_GT(rep.closest_miss, kConnectionTol);
}

TEST(VertexConnections, TriangleHasNone) {
    VertexConnectionReport rep = find_vertex_connections(equilateral(), 10);
    EXPECT_TRUE(rep.found.empty());
}

TEST(VertexConnections, LShapeThroughReflexVertex) {
    VertexConnectionReport rep = find_vertex_connections(l_shape(), 4);
    bool round_trip = false;
    for (const auto& c : rep.found)
        if (c.from == 3 && c.to == 3 && c.order == 2) round_trip = true;
    EXPECT_TRUE(round_trip);
}

TEST(VertexConnections, ReplayRejectsNearMiss) {
    Polygon tilted = l_shape(2e-11);
    VertexConnectionReport loose = find_vertex_connections(tilted, 4, false);
    VertexConnectionReport strict = find_vertex_connections(tilted, 4, true);
    EXPECT_GT(loose.found.size(), strict.found.size());
    EXPECT_GT(strict.rejected, 0);
}

TEST(VertexConnections, SingularSelfHitImpliesConnection) {
    EXPECT_TRUE(slap_singular_self_hit(l_shape(), 3));
    EXPECT_FALSE(find_vertex_connections(l_shape(), 4).found.empty());
    Rng rng(29);
    for (int k = 0; k < 40; ++k) {
        Polygon poly = random_star(rng, 5 + k % 5);
        if (slap_singular_self_hit(poly, 6)) EXPECT_FALSE(find_vertex_connections(poly, 7).found.empty()) << k;
    }
}

TEST(VertexConnections, SingularPointsAimAtVertexes) {
    for (const Polygon& poly : {pentagon(), l_shape(), slotted_room()}) {
        for (double s : slap_singular_points(poly)) {
            BoundaryPoint bp = poly.point_at(s);
            EXPECT_FALSE(bp.at_vertex);
            auto r = slap_step(poly, s);
            EXPECT_TRUE(std::holds_alternative<Singular>(r));
        }
    }
    // Pentagon: each vertex projects onto the midpoint of the opposite side.
    std::vector<double> S = slap_singular_points(pentagon());
    ASSERT_EQ(S.size(), 5u);
    for (int e = 0; e < 5; ++e) EXPECT_NEAR(S[e], e + 0.5, 1e-12);
}
