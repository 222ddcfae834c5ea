#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qv/dirichlet.hpp"

using namespace qv;

namespace {

QTuple line(std::initializer_list<double> xs)
{
    std::vector<Point> p;
    for (double x : xs) p.push_back({x});
    return QTuple(p);
}

GridFunction boundary_problem(GridFunction g, const std::function<QTuple(std::span<const double>)>& f)
{
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.mask[k] == NodeKind::boundary) g.values[k] = f(g.location(k));
    return g;
}

} // namespace

TEST(Dirichlet, AffineBoundaryOnASquare)
{
    const auto g = boundary_problem(make_box_grid(2, 17, 0.0, 1.0, 1, 1),
                                    [](std::span<const double> x) { return line({0.3 + 2.0 * x[0] - x[1]}); });
    const auto r = solve_dirichlet(g);
    const auto u = oracle::scalar_laplace(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        EXPECT_NEAR(r.solution.values[k].point(0)[0], u[k], 1e-8);
        const auto x = g.location(k);
        EXPECT_NEAR(u[k], 0.3 + 2.0 * x[0] - x[1], 1e-10);
    }
}

TEST(Dirichlet, CurvedBoundaryOnADisk)
{
    const auto g = boundary_problem(make_ball_grid(2, 21, 1.0, 1, 1), [](std::span<const double> x) {
        return line({std::exp(x[0]) * std::sin(3.0 * x[1])});
    });
    const auto r = solve_dirichlet(g);
    const auto u = oracle::scalar_laplace(g);
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.active(k)) {
            EXPECT_NEAR(r.solution.values[k].point(0)[0], u[k], 1e-8);
        }
}

TEST(Dirichlet, SeparatedSheetsSolveIndependently)
{
    auto low = [](std::span<const double> x) { return 0.5 * x[0] * x[0] - 0.2 * x[1]; };
    auto high = [](std::span<const double> x) { return 10.0 + std::sin(2.0 * x[0] + x[1]); };
    const GridFunction base = make_ball_grid(2, 17, 1.0, 2, 1);
    const auto g = boundary_problem(base, [&](std::span<const double> x) { return line({high(x), low(x)}); });
    const auto ul = oracle::scalar_laplace(boundary_problem(make_ball_grid(2, 17, 1.0, 1, 1),
                                                            [&](std::span<const double> x) { return line({low(x)}); }));
    const auto uh = oracle::scalar_laplace(boundary_problem(make_ball_grid(2, 17, 1.0, 1, 1),
                                                            [&](std::span<const double> x) { return line({high(x)}); }));
    const auto r = solve_dirichlet(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (!g.active(k)) continue;
        EXPECT_LE(distance(r.solution.values[k], line({ul[k], uh[k]}), MetricKind::G2), 1e-8);
    }
}

TEST(Dirichlet, ConstantBoundaryGivesConstant)
{
    const QTuple c(std::vector<Point>{{1, 2}, {-1, 0}, {1, 2}});
    const auto g = boundary_problem(make_box_grid(2, 9, 0.0, 1.0, 3, 2), [&](std::span<const double>) { return c; });
    const auto r = solve_dirichlet(g);
    for (std::size_t k = 0; k < g.node_count(); ++k) EXPECT_LE(distance(r.solution.values[k], c, MetricKind::G2), 1e-9);
    EXPECT_LE(r.report.total, 1e-16);
}

TEST(Dirichlet, KeepsBoundaryAndDecreasesEnergy)
{
    const GridFunction g = oracle::sqrt_disk(17, false);
    DirichletOptions opt;
    opt.restarts = 2;
    const auto r = solve_dirichlet(g, opt);
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.mask[k] != NodeKind::interior) {
            EXPECT_TRUE(r.solution.values[k].identical(g.values[k]));
        }
    ASSERT_FALSE(r.history.empty());
    for (std::size_t i = 1; i < r.history.size(); ++i) EXPECT_LE(r.history[i], r.history[i - 1]);
    EXPECT_DOUBLE_EQ(r.history.back(), r.report.total);
    EXPECT_EQ(r.run_energy.size(), 2u);
    EXPECT_EQ(r.report.total, *std::min_element(r.run_energy.begin(), r.run_energy.end()));
    EXPECT_LE(r.report.total, discrete_energy(oracle::sqrt_disk(17, true), 2.0).total + 1e-6);
}

TEST(Dirichlet, Deterministic)
{
    const GridFunction g = oracle::sqrt_disk(13, false);
    const auto a = solve_dirichlet(g), b = solve_dirichlet(g);
    EXPECT_EQ(a.report.total, b.report.total);
    for (std::size_t k = 0; k < g.node_count(); ++k) EXPECT_TRUE(a.solution.values[k].identical(b.solution.values[k]));
}

TEST(Dirichlet, GradientSolverForOtherExponents)
{
    const auto g = boundary_problem(make_box_grid(2, 9, 0.0, 1.0, 1, 1),
                                    [](std::span<const double> x) { return line({x[0] + 0.5 * x[1]}); });
    DirichletOptions opt;
    opt.p = 3.0;
    const auto r = solve_dirichlet(g, opt);
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        const auto x = g.location(k);
        EXPECT_NEAR(r.solution.values[k].point(0)[0], x[0] + 0.5 * x[1], 1e-4);
    }
    EXPECT_LE(r.report.total, r.history.front());
}

TEST(Dirichlet, RejectsBadInput)
{
    const auto g = boundary_problem(make_box_grid(2, 5, 0.0, 1.0, 1, 1), [](std::span<const double>) { return line({1}); });
    DirichletOptions opt;
    opt.p = 1.0;
    EXPECT_THROW(solve_dirichlet(g, opt), InvalidInput);
    opt.p = 9.0;
    EXPECT_THROW(solve_dirichlet(g, opt), InvalidInput);
    opt.p = 3.0;
    opt.inner = InnerSolver::p2_linear;
    EXPECT_THROW(solve_dirichlet(g, opt), InvalidInput);
    opt = {};
    opt.restarts = 0;
    EXPECT_THROW(solve_dirichlet(g, opt), InvalidInput);

    GridFunction island = g;
    for (std::size_t k = 0; k < island.node_count(); ++k)
        if (island.mask[k] == NodeKind::boundary) island.mask[k] = NodeKind::outside;
    EXPECT_THROW(solve_dirichlet(island), InvalidInput);
}
