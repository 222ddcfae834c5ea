#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qv/branches.hpp"
#include "qv/qspace.hpp"
#include "qv/random.hpp"

using namespace qv;

namespace {

QTuple line(std::initializer_list<double> xs)
{
    std::vector<Point> p;
    for (double x : xs) p.push_back({x});
    return QTuple(p);
}

} // namespace

TEST(QTuple, RejectsBadShapes)
{
    EXPECT_THROW(QTuple(0, 1, {}), InvalidInput);
    EXPECT_THROW(QTuple(2, 1, {1.0}), InvalidInput);
    EXPECT_THROW(QTuple(1, 1, {NAN}), InvalidInput);
    EXPECT_THROW(QTuple(std::vector<Point>{{1.0}, {1.0, 2.0}}), InvalidInput);
}

TEST(QTuple, EqualityIsMultisetEquality)
{
    EXPECT_EQ(line({1, 2, 2}), line({2, 1, 2}));
    EXPECT_NE(line({1, 2, 2}), line({1, 1, 2}));
    EXPECT_FALSE(line({1, 2}).identical(line({2, 1})));
    EXPECT_TRUE(line({2, 1}).canonical().identical(line({1, 2})));
}

TEST(Dist, SinglePoint)
{
    const auto r = dist(line({3}), line({5}), MetricKind::G2);
    EXPECT_DOUBLE_EQ(r.value, 2.0);
    EXPECT_EQ(r.match.perm, std::vector<std::size_t>{0});
}

TEST(Dist, TwoPointsInThePlane)
{
    const QTuple v(std::vector<Point>{{-1, 1}, {1, 0}});
    const QTuple w(std::vector<Point>{{-1, 0}, {1, 1}});
    EXPECT_NEAR(distance(v, w, MetricKind::G2), std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(distance(v, w, MetricKind::G1), 2.0, 1e-15);
    EXPECT_NEAR(distance(v, w, MetricKind::GINF), 1.0, 1e-15);
    EXPECT_EQ(dist(v, w, MetricKind::G2).match.perm, (std::vector<std::size_t>{0, 1}));
}

TEST(Dist, IdenticalTuplesGiveZeroAndIdentity)
{
    Rng rng(3);
    for (int t = 0; t < 20; ++t) {
        const QTuple v = rng.tuple(4, 2);
        for (MetricKind k : {MetricKind::G1, MetricKind::G2, MetricKind::GINF}) {
            const auto r = dist(v, v, k);
            EXPECT_EQ(r.value, 0.0);
            EXPECT_EQ(r.match.perm, (std::vector<std::size_t>{0, 1, 2, 3}));
        }
    }
}

TEST(Dist, ReportedMatchingAttainsValue)
{
    Rng rng(11);
    for (int t = 0; t < 200; ++t) {
        const std::size_t Q = 1 + rng.index(5), n = 1 + rng.index(3);
        const QTuple v = rng.tuple(Q, n, {0.3, 1e-3, 0.2}), w = rng.tuple(Q, n, {0.3, 1e-3, 0.2});
        for (MetricKind k : {MetricKind::G1, MetricKind::G2, MetricKind::GINF}) {
            const auto r = dist(v, w, k);
            ASSERT_TRUE(r.match.valid());
            double agg = 0.0;
            for (std::size_t i = 0; i < Q; ++i) {
                const double d = detail::distance(v.point(i), w.point(r.match.perm[i]));
                if (k == MetricKind::G1) agg += d;
                else if (k == MetricKind::G2) agg += d * d;
                else agg = std::max(agg, d);
            }
            if (k == MetricKind::G2) agg = std::sqrt(agg);
            EXPECT_NEAR(agg, r.value, 1e-12);
            EXPECT_NEAR(r.value, oracle::brute_distance(v, w, k), 1e-9);
        }
    }
}

TEST(Dist, IsSymmetricAndOrderFree)
{
    Rng rng(5);
    for (int t = 0; t < 100; ++t) {
        const QTuple v = rng.tuple(4, 2), w = rng.tuple(4, 2);
        const QTuple vs = v.reordered(rng.permutation(4));
        for (MetricKind k : {MetricKind::G1, MetricKind::G2, MetricKind::GINF}) {
            EXPECT_NEAR(distance(v, w, k), distance(w, v, k), 1e-12);
            EXPECT_NEAR(distance(v, w, k), distance(vs, w, k), 1e-12);
        }
    }
}

TEST(Dist, MismatchedShapesThrow)
{
    EXPECT_THROW(dist(line({1, 2}), line({1}), MetricKind::G2), InvalidInput);
    EXPECT_THROW(dist(line({1}), QTuple(1, 2, {0, 0}), MetricKind::G2), InvalidInput);
    EXPECT_THROW(metric_from_string("g3"), InvalidInput);
}

TEST(DistSorted1d, Examples)
{
    EXPECT_NEAR(dist_sorted_1d(line({1, 5, 2}), line({0, 2, 6})), std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(dist_sorted_1d(line({-3}), line({4})), 7.0);
    EXPECT_EQ(dist_sorted_1d(line({1, 5, 2}), line({2, 1, 5})), 0.0);
    EXPECT_THROW(dist_sorted_1d(QTuple(1, 2, {0, 0}), QTuple(1, 2, {0, 0})), InvalidInput);
}

TEST(DistSorted1d, AgreesWithAssignment)
{
    Rng rng(9);
    for (int t = 0; t < 200; ++t) {
        const QTuple v = rng.tuple(5, 1), w = rng.tuple(5, 1);
        EXPECT_NEAR(dist_sorted_1d(v, w), oracle::brute_distance(v, w, MetricKind::G2), 1e-12);
    }
}

TEST(SplitDistance, Examples)
{
    EXPECT_DOUBLE_EQ(split_distance(line({0, 0, 3})), 3.0);
    EXPECT_TRUE(std::isinf(split_distance(line({2, 2, 2}))));
    EXPECT_DOUBLE_EQ(split_distance(QTuple(std::vector<Point>{{0, 0}, {1, 0}, {5, 0}})), 1.0);
}

TEST(Concatenate, Examples)
{
    EXPECT_EQ(concatenate(line({1}), line({2})), line({1, 2}));
    const QTuple a = line({1, 2}), b = line({2}), c = line({7, -1});
    EXPECT_EQ(concatenate(concatenate(a, b), c), concatenate(a, concatenate(b, c)));
    const Support s = support_sigma(concatenate(a, b));
    ASSERT_EQ(s.sigma(), 2u);
    EXPECT_EQ(s.multiplicities, (std::vector<std::size_t>{1, 2}));
    EXPECT_THROW(concatenate(line({1}), QTuple(1, 2, {0, 0})), InvalidInput);
}

TEST(Support, Examples)
{
    const Support s = support_sigma(line({1, 1, 3}));
    EXPECT_EQ(s.sigma(), 2u);
    EXPECT_EQ(s.points, (std::vector<Point>{{1}, {3}}));
    EXPECT_EQ(s.multiplicities, (std::vector<std::size_t>{2, 1}));
    EXPECT_EQ(support_sigma(line({4, 4, 4, 4})).sigma(), 1u);
    EXPECT_EQ(support_sigma(line({1, 2, 3})).sigma(), 3u);
}

TEST(LocalSplit, GroupsNearSupportPoints)
{
    const auto s = local_split(line({0, 0, 10}), line({0.1, -0.1, 9.8}));
    ASSERT_EQ(s.parts.size(), 2u);
    EXPECT_EQ(s.parts[0], line({0.1, -0.1}));
    EXPECT_EQ(s.parts[1], line({9.8}));
    EXPECT_TRUE(s.assignment.valid());
}

TEST(LocalSplit, CenterEqualsV)
{
    const QTuple v = line({1, 1, 4, 6, 6});
    const auto s = local_split(v, v);
    ASSERT_EQ(s.parts.size(), 3u);
    EXPECT_EQ(s.parts[0], line({1, 1}));
    EXPECT_EQ(s.parts[1], line({4}));
    EXPECT_EQ(s.parts[2], line({6, 6}));
}

TEST(LocalSplit, OutsideRadiusThrows)
{
    EXPECT_THROW(local_split(line({0, 10}), line({6, 6})), SplitRadiusError);
    EXPECT_THROW(local_split(line({0, 10}), line({5, 10})), SplitRadiusError);
}

TEST(SelectBranches, CrossingLines)
{
    GridFunction g = make_box_grid(1, 21, -1.0, 1.0, 2, 1);
    fill(g, [](std::span<const double> x) { return line({x[0], -x[0]}); });
    const auto sel = select_branches(g);
    ASSERT_EQ(sel.branches.size(), 2u);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const QTuple rebuilt(std::vector<Point>{sel.branches[0][k], sel.branches[1][k]});
        EXPECT_EQ(rebuilt, g.values[k]);
    }
    // Away from the crossing each branch is +x or -x on each side.
    for (std::size_t i = 0; i < 2; ++i) {
        const double s = sel.branches[i][2][0] / g.location(2)[0];
        for (std::size_t k = 0; k < 9; ++k) EXPECT_DOUBLE_EQ(sel.branches[i][k][0], s * g.location(k)[0]);
    }
}

TEST(SelectBranches, ConstantMap)
{
    GridFunction g = make_box_grid(2, 5, 0.0, 1.0, 3, 2);
    fill(g, [](std::span<const double>) { return QTuple(std::vector<Point>{{1, 2}, {0, 0}, {1, 2}}); });
    const auto sel = select_branches(g);
    for (const auto& b : sel.branches)
        for (std::size_t k = 1; k < g.node_count(); ++k) EXPECT_EQ(b[k], b[0]);
    EXPECT_TRUE(sel.discontinuous_edges.empty());
}

TEST(SelectBranches, SquareRootOnCircleHasNoContinuousSelection)
{
    const GridFunction g = oracle::sqrt_disk(64, true);
    const auto sel = select_branches(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.active(k)) continue;
        const QTuple rebuilt(std::vector<Point>{sel.branches[0][k], sel.branches[1][k]});
        ASSERT_EQ(rebuilt, g.values[k]);
    }
    EXPECT_FALSE(sel.discontinuous_edges.empty());
}
