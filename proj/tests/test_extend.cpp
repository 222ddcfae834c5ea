#include <gtest/gtest.h>

#include <cmath>

#include "qv/extend.hpp"
#include "qv/random.hpp"

using namespace qv;

namespace {

QTuple line(std::initializer_list<double> xs)
{
    std::vector<Point> p;
    for (double x : xs) p.push_back({x});
    return QTuple(p);
}

BoundarySample circle(std::size_t count, double R, const std::function<QTuple(double)>& value)
{
    BoundarySample s;
    s.m = 2;
    s.R = R;
    for (std::size_t k = 0; k < count; ++k) {
        const double t = 2.0 * M_PI * static_cast<double>(k) / static_cast<double>(count);
        s.points.push_back({{R * std::cos(t), R * std::sin(t)}, value(t)});
    }
    return s;
}

BoundarySample scaled(BoundarySample s, double t)
{
    for (auto& p : s.points) p.v = p.v.scaled(t);
    return s;
}

} // namespace

TEST(Cone, ReproducesSamples)
{
    Rng rng(1);
    const auto s = circle(40, 1.5, [&](double) { return rng.tuple(3, 2); });
    const ConeExtension ext(s);
    for (const auto& p : s.points) EXPECT_TRUE(ext(p.x).identical(p.v) || ext(p.x) == p.v);
}

TEST(Cone, CenterOfAnInterval)
{
    BoundarySample s;
    s.m = 1;
    s.R = 1.0;
    s.points = {{{-1.0}, line({2.0})}, {{1.0}, line({5.0})}};
    EXPECT_EQ(cone_extend(s, Point{0.0}), line({2.0}));
    // Q = 1 radial formula half way out: (1 - r/R) f(x0) + (r/R) f(R x / r).
    EXPECT_DOUBLE_EQ(cone_extend(s, Point{0.5}).point(0)[0], 0.5 * 2.0 + 0.5 * 5.0);
    EXPECT_DOUBLE_EQ(cone_extend(s, Point{-0.5}).point(0)[0], 2.0);
}

TEST(Cone, SplitsFarApartGroups)
{
    // Two sheets 100 apart, each wiggling by 0.01: the oscillation is tiny
    // compared with the gap, so the cone splits and keeps the sheets apart.
    auto value = [](double t) {
        const double r = 0.01;
        return QTuple(std::vector<Point>{{r * std::cos(t), r * std::sin(t)}, {100.0 - r * std::cos(2 * t), r * std::sin(t)}});
    };
    const auto s = circle(64, 1.0, value);
    const ConeExtension ext(s);
    EXPECT_TRUE(ext.cone().is_split());

    double data_lip = 0.0;
    for (std::size_t a = 0; a < s.points.size(); ++a)
        for (std::size_t b = a + 1; b < s.points.size(); ++b)
            data_lip = std::max(data_lip, distance(s.points[a].v, s.points[b].v, MetricKind::G2) /
                                              detail::distance(s.points[a].x, s.points[b].x));
    const int N = 41;
    double lip = 0.0;
    std::vector<QTuple> vals(N * N);
    std::vector<bool> in(N * N, false);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
            const Point x{-1.0 + 2.0 * i / (N - 1), -1.0 + 2.0 * j / (N - 1)};
            if (detail::norm(x) > 1.0) continue;
            in[i * N + j] = true;
            vals[i * N + j] = ext(x);
            const QTuple c = vals[i * N + j].canonical();
            EXPECT_LE(detail::norm(c.point(0)), 0.011);
            EXPECT_NEAR(c.point(1)[0], 100.0, 0.011);
        }
    const double h = 2.0 / (N - 1);
    for (int i = 0; i + 1 < N; ++i)
        for (int j = 0; j + 1 < N; ++j) {
            if (!in[i * N + j]) continue;
            if (in[(i + 1) * N + j]) lip = std::max(lip, distance(vals[i * N + j], vals[(i + 1) * N + j], MetricKind::G2) / h);
            if (in[i * N + j + 1]) lip = std::max(lip, distance(vals[i * N + j], vals[i * N + j + 1], MetricKind::G2) / h);
        }
    EXPECT_TRUE(std::isfinite(lip));
    EXPECT_GT(data_lip, 0.0);
    EXPECT_LT(lip, 1.0);
    RecordProperty("grid_lip_over_data_lip", std::to_string(lip / data_lip));
}

TEST(Cone, SupBound)
{
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const QTuple base = rng.tuple(3, 2);
        auto s = circle(24, 1.0, [&](double) { return rng.perturb(base, 0.2); });
        if (t % 2) s.points[5].v = s.points[5].v.scaled(10.0);
        const ConeExtension ext(s);
        const QTuple probe = rng.tuple(3, 2);
        double data = 0.0, got = 0.0;
        for (const auto& p : s.points) data = std::max(data, distance(p.v, probe, MetricKind::GINF));
        for (int k = 0; k < 200; ++k) {
            Point x = rng.point(2);
            if (detail::norm(x) > 1.0) continue;
            got = std::max(got, distance(ext(x), probe, MetricKind::GINF));
        }
        EXPECT_LE(got, (6.0 * 3 + 2.0) * data + 1e-12);
    }
}

TEST(Cone, Homogeneous)
{
    Rng rng(4);
    const QTuple base = rng.tuple(2, 3);
    const auto s = circle(30, 1.0, [&](double) { return rng.perturb(base, 0.3); });
    const ConeExtension a(s), b(scaled(s, 0.37));
    for (int k = 0; k < 200; ++k) {
        Point x = rng.point(2);
        if (detail::norm(x) > 1.0) continue;
        EXPECT_LE(distance(b(x), a(x).scaled(0.37), MetricKind::G2), 1e-12);
    }
}

TEST(Cone, Errors)
{
    BoundarySample empty;
    empty.m = 2;
    EXPECT_THROW(ConeExtension{empty}, InvalidInput);
    const auto s = circle(8, 1.0, [](double) { return line({1.0}); });
    EXPECT_THROW(cone_extend(s, Point{2.0, 0.0}), InvalidInput);
    EXPECT_THROW(cone_extend(s, Point{0.0}), InvalidInput);
    auto off = s;
    off.points[0].x = {0.5, 0.0};
    EXPECT_THROW(ConeExtension{off}, InvalidInput);
}

TEST(Whitney, ReproducesSamples)
{
    Rng rng(5);
    std::vector<Point> loc;
    std::vector<QTuple> val;
    for (int k = 0; k < 30; ++k) {
        loc.push_back(rng.point(2, 0.0, 1.0));
        val.push_back(rng.tuple(2, 2));
    }
    const WhitneyExtension ext(loc, val, Box{{0.0, 0.0}, {1.0, 1.0}}, 12);
    for (std::size_t k = 0; k < loc.size(); ++k) EXPECT_TRUE(ext(loc[k]).identical(val[k]));
}

TEST(Whitney, TwoPointsOnTheUnitInterval)
{
    const std::vector<Point> loc{{0.0}, {1.0}};
    const std::vector<QTuple> val{line({0.0}), line({1.0})};
    const WhitneyExtension ext(loc, val, Box{{0.0}, {1.0}}, 10);
    // 0.5 is a vertex of accepted cubes; both samples are nearest, the first wins.
    EXPECT_EQ(ext(Point{0.5}), line({0.0}));
    EXPECT_EQ(ext(Point{0.0}), line({0.0}));
    EXPECT_EQ(ext(Point{1.0}), line({1.0}));

    // Vertex values and Lipschitz estimates. On cubes with
    // dist/2 <= side < dist the vertex map is 7-Lipschitz; every accepted
    // dyadic cube has dist <= 4 side, which bounds vertex jumps by 11 side
    // and the edge cones by twice that.
    for (const auto& cube : ext.accepted_cubes()) {
        const auto& vs = cube.vertices;
        const double jump = distance(ext.vertex_value(vs[0]), ext.vertex_value(vs[1]), MetricKind::GINF);
        EXPECT_LE(cube.dist, 4.0 * cube.side + 1e-15);
        EXPECT_LE(jump, 11.0 * cube.side + 1e-12);
        if (cube.dist / 2.0 <= cube.side) {
            EXPECT_LE(jump, 7.0 * cube.side + 1e-12);
        }
    }
    const int N = 4097;
    double lip = 0.0;
    QTuple prev = ext(Point{0.0});
    for (int i = 1; i < N; ++i) {
        const QTuple cur = ext(Point{static_cast<double>(i) / (N - 1)});
        lip = std::max(lip, distance(prev, cur, MetricKind::G2) * (N - 1));
        prev = cur;
    }
    EXPECT_LE(lip, 22.0 + 1e-9);
    RecordProperty("measured_lip", std::to_string(lip));
}

TEST(Whitney, SingleSampleIsConstant)
{
    const QTuple v = QTuple(std::vector<Point>{{1, 2}, {3, 4}});
    const WhitneyExtension ext({{0.3, 0.6}}, {v}, Box{{0.0, 0.0}, {1.0, 1.0}}, 8);
    Rng rng(6);
    for (int k = 0; k < 100; ++k) EXPECT_EQ(ext(rng.point(2, 0.0, 1.0)), v);
}

TEST(Whitney, Homogeneous)
{
    Rng rng(7);
    std::vector<Point> loc;
    std::vector<QTuple> val, val_t;
    for (int k = 0; k < 12; ++k) {
        loc.push_back(rng.point(2, -1.0, 1.0));
        val.push_back(rng.tuple(3, 2));
        val_t.push_back(val.back().scaled(0.25));
    }
    const Box box{{-1.0, -1.0}, {1.0, 1.0}};
    const WhitneyExtension a(loc, val, box, 10), b(loc, val_t, box, 10);
    for (int k = 0; k < 300; ++k) {
        const Point x = rng.point(2);
        EXPECT_LE(distance(b(x), a(x).scaled(0.25), MetricKind::G2), 1e-12);
    }
}

TEST(Whitney, Errors)
{
    const std::vector<QTuple> v{line({1.0})};
    EXPECT_THROW(WhitneyExtension({{0, 0, 0}}, v, Box{{0, 0, 0}, {1, 1, 1}}, 4), InvalidInput);
    EXPECT_THROW(WhitneyExtension({{0.5}}, v, Box{{0.0}, {1.0}}, whitney_max_depth + 1), InvalidInput);
    EXPECT_THROW(WhitneyExtension({}, {}, Box{{0.0}, {1.0}}, 4), InvalidInput);
    EXPECT_THROW(WhitneyExtension({{0.5}, {0.5}}, {line({1.0}), line({2.0})}, Box{{0.0}, {1.0}}, 4), InvalidInput);
    const WhitneyExtension ext({{0.5}}, v, Box{{0.0}, {1.0}}, 4);
    EXPECT_THROW(ext(Point{1.5}), InvalidInput);
}

TEST(Plane, OuterRegionIsZeroAndBallUnchanged)
{
    GridFunction f = make_ball_grid(2, 17, 1.0, 2, 2);
    Rng rng(8);
    randomize(f, rng);
    const GridFunction g = extend_to_plane(f);
    for (std::size_t a = 0; a < 2; ++a) {
        EXPECT_LE(g.origin[a], -2.0 + 1e-12);
        EXPECT_GE(g.origin[a] + g.h * static_cast<double>(g.shape[a] - 1), 2.0 - 1e-12);
    }
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.location(k);
        const double r = detail::norm(x);
        if (r >= 1.5) {
            EXPECT_TRUE(g.values[k].identical(QTuple::zero(2, 2)));
        }
        if (r < 1.0 - 1e-12) {
            const std::size_t node = detail::nearest_active(f, x);
            ASSERT_LT(detail::distance(f.location(node), x), 1e-12);
            EXPECT_TRUE(g.values[k].identical(f.values[node]));
        }
    }
}

TEST(Plane, ReflectedConstant)
{
    GridFunction f = make_ball_grid(2, 9, 1.0, 3, 2);
    fill(f, [](std::span<const double>) { return QTuple::repeated(3, Point{2.0, -4.0}); });
    const GridFunction g = extend_to_plane(f);
    bool found = false;
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.location(k);
        if (std::abs(x[0] - 1.25) < 1e-12 && std::abs(x[1]) < 1e-12) {
            EXPECT_LE(distance(g.values[k], QTuple::repeated(3, Point{1.0, -2.0}), MetricKind::G2), 1e-12);
            found = true;
        }
    }
    EXPECT_TRUE(found);
}

TEST(Plane, Homogeneous)
{
    GridFunction f = make_ball_grid(2, 13, 1.0, 2, 1);
    Rng rng(9);
    randomize(f, rng);
    GridFunction ft = f;
    for (auto& v : ft.values) v = v.scaled(3.5);
    const GridFunction a = extend_to_plane(f), b = extend_to_plane(ft);
    for (std::size_t k = 0; k < a.node_count(); ++k)
        EXPECT_LE(distance(b.values[k], a.values[k].scaled(3.5), MetricKind::G2), 1e-12);
}

TEST(Plane, RejectsOtherGrids)
{
    EXPECT_THROW(extend_to_plane(make_box_grid(2, 9, 0.0, 1.0, 1, 1)), InvalidInput);
}
