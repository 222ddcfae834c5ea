#pragma once

// Discrete p-Dirichlet problem for Q-valued maps by alternating minimisation:
// optimal G2 matchings on every edge, then the branch-lifted vector problem
// with those matchings frozen.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <string>
#include <vector>

#include "qv/cg.hpp"
#include "qv/energy.hpp"
#include "qv/extend.hpp"
#include "qv/random.hpp"

namespace qv {

enum class InnerSolver { automatic, p2_linear, gradient };
enum class InitMethod { whitney, nearest_boundary };

struct DirichletOptions {
    double p = 2.0;
    std::size_t max_outer = 200;
    /// Outer iterations stop once the energy drops by less than tol (1 + E).
    double tol = 1e-10;
    InnerSolver inner = InnerSolver::automatic;
    /// CG stops at |residual| <= linear_tol |rhs|.
    double linear_tol = 1e-12;
    std::size_t max_inner = 200;
    /// Total number of runs; runs after the first start from a randomly
    /// perturbed initial guess. The lowest energy wins.
    std::size_t restarts = 3;
    std::uint64_t seed = 1;
    InitMethod init = InitMethod::whitney;
    double max_p = 8.0;
    /// After the alternation settles, matchings on the edges of plaquettes
    /// with nontrivial holonomy (branch points) are changed one transposition
    /// at a time and kept when the energy drops. Caps the accepted moves.
    std::size_t defect_moves = 256;
};

struct DirichletResult {
    GridFunction solution;
    EnergyReport report;
    std::vector<double> history;    ///< energies of the winning run, starting with its initial guess
    std::vector<double> run_energy; ///< final energy of each run
    std::size_t best_run = 0;
    std::size_t defect_moves = 0; ///< accepted branch-point moves in the winning run
};

namespace detail {

// Interior values as a flat array; boundary values are read from the grid.
class Lifted {
public:
    explicit Lifted(const GridFunction& g) : g_(g), index_(g.node_count(), none)
    {
        for (std::size_t k = 0; k < g.node_count(); ++k)
            if (g.mask[k] == NodeKind::interior) {
                index_[k] = interior_.size();
                interior_.push_back(k);
            }
        x_.assign(interior_.size() * g.Q * g.n, 0.0);
        for (std::size_t u = 0; u < interior_.size(); ++u) {
            auto c = g.values[interior_[u]].coords();
            std::copy(c.begin(), c.end(), x_.begin() + u * g.Q * g.n);
        }
    }

    static constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    std::size_t index(std::size_t node) const { return index_[node]; }
    const std::vector<std::size_t>& interior() const { return interior_; }
    std::vector<double>& x() { return x_; }
    const std::vector<double>& x() const { return x_; }

    const double* point(const std::vector<double>& x, std::size_t node, std::size_t i) const
    {
        const std::size_t u = index_[node];
        if (u == none) return g_.values[node].point(i).data();
        return x.data() + (u * g_.Q + i) * g_.n;
    }

    GridFunction materialize(const std::vector<double>& x) const
    {
        GridFunction out = g_;
        const std::size_t block = g_.Q * g_.n;
        for (std::size_t u = 0; u < interior_.size(); ++u)
            out.values[interior_[u]] =
                QTuple(g_.Q, g_.n, std::vector<double>(x.begin() + u * block, x.begin() + (u + 1) * block));
        return out;
    }

private:
    const GridFunction& g_;
    std::vector<std::size_t> index_;
    std::vector<std::size_t> interior_;
    std::vector<double> x_;
};

struct FrozenEdge {
    std::size_t a, b;
    std::vector<std::size_t> perm;
};

inline double frozen_energy(const Lifted& L, const GridFunction& g, const std::vector<FrozenEdge>& edges,
                            const std::vector<double>& x, double p)
{
    const double scale = std::pow(g.h, static_cast<double>(g.m) - p);
    double e = 0.0;
    for (const auto& fe : edges) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.Q; ++i) {
            const double* pa = L.point(x, fe.a, i);
            const double* pb = L.point(x, fe.b, fe.perm[i]);
            for (std::size_t j = 0; j < g.n; ++j) s += (pa[j] - pb[j]) * (pa[j] - pb[j]);
        }
        e += scale * power(std::sqrt(s), p);
    }
    return e;
}

inline void frozen_gradient(const Lifted& L, const GridFunction& g, const std::vector<FrozenEdge>& edges,
                            const std::vector<double>& x, double p, std::vector<double>& grad)
{
    std::fill(grad.begin(), grad.end(), 0.0);
    const double scale = std::pow(g.h, static_cast<double>(g.m) - p);
    const std::size_t Q = g.Q, n = g.n;
    for (const auto& fe : edges) {
        const std::size_t ua = L.index(fe.a), ub = L.index(fe.b);
        if (ua == Lifted::none && ub == Lifted::none) continue;
        double s = 0.0;
        for (std::size_t i = 0; i < Q; ++i) {
            const double* pa = L.point(x, fe.a, i);
            const double* pb = L.point(x, fe.b, fe.perm[i]);
            for (std::size_t j = 0; j < n; ++j) s += (pa[j] - pb[j]) * (pa[j] - pb[j]);
        }
        if (s == 0.0) continue;
        const double coef = scale * p * std::pow(s, 0.5 * p - 1.0);
        for (std::size_t i = 0; i < Q; ++i) {
            const double* pa = L.point(x, fe.a, i);
            const double* pb = L.point(x, fe.b, fe.perm[i]);
            for (std::size_t j = 0; j < n; ++j) {
                const double d = coef * (pa[j] - pb[j]);
                if (ua != Lifted::none) grad[(ua * Q + i) * n + j] += d;
                if (ub != Lifted::none) grad[(ub * Q + fe.perm[i]) * n + j] -= d;
            }
        }
    }
}

// p = 2: with matchings frozen the energy splits into independent graph
// Dirichlet problems, one per coordinate, on the lifted nodes.
inline void solve_p2(Lifted& L, const GridFunction& g, const std::vector<FrozenEdge>& edges, double linear_tol)
{
    const std::size_t Q = g.Q, n = g.n, N = L.interior().size() * Q;
    std::vector<std::vector<std::size_t>> nb(N);
    std::vector<std::vector<const double*>> fixed(N);
    for (const auto& fe : edges) {
        const std::size_t ua = L.index(fe.a), ub = L.index(fe.b);
        for (std::size_t i = 0; i < Q; ++i) {
            const std::size_t la = ua == Lifted::none ? Lifted::none : ua * Q + i;
            const std::size_t lb = ub == Lifted::none ? Lifted::none : ub * Q + fe.perm[i];
            if (la != Lifted::none) {
                if (lb != Lifted::none) nb[la].push_back(lb);
                else fixed[la].push_back(L.point(L.x(), fe.b, fe.perm[i]));
            }
            if (lb != Lifted::none) {
                if (la != Lifted::none) nb[lb].push_back(la);
                else fixed[lb].push_back(L.point(L.x(), fe.a, i));
            }
        }
    }
    auto apply = [&](const std::vector<double>& in, std::vector<double>& out) {
        for (std::size_t u = 0; u < N; ++u) {
            double s = static_cast<double>(nb[u].size() + fixed[u].size()) * in[u];
            for (std::size_t v : nb[u]) s -= in[v];
            out[u] = s;
        }
    };
    std::vector<double> b(N), x(N);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t u = 0; u < N; ++u) {
            double s = 0.0;
            for (const double* p : fixed[u]) s += p[j];
            b[u] = s;
            x[u] = L.x()[u * n + j];
        }
        conjugate_gradient(apply, b, x, linear_tol, 20 * N + 100);
        for (std::size_t u = 0; u < N; ++u) L.x()[u * n + j] = x[u];
    }
}

// Damped gradient descent with Armijo backtracking on the frozen energy.
inline void solve_gradient(Lifted& L, const GridFunction& g, const std::vector<FrozenEdge>& edges, double p,
                           double tol, std::size_t max_inner)
{
    std::vector<double>& x = L.x();
    std::vector<double> grad(x.size()), trial(x.size());
    double f = frozen_energy(L, g, edges, x, p);
    double step = 1.0;
    for (std::size_t it = 0; it < max_inner; ++it) {
        frozen_gradient(L, g, edges, x, p, grad);
        double gg = 0.0;
        for (double v : grad) gg += v * v;
        if (gg == 0.0) break;
        step *= 2.0;
        bool accepted = false;
        double f_new = f;
        for (int back = 0; back < 80; ++back) {
            for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] - step * grad[k];
            f_new = frozen_energy(L, g, edges, trial, p);
            if (f_new <= f - 1e-4 * step * gg) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        x.swap(trial);
        const double decrease = f - f_new;
        f = f_new;
        if (decrease < tol * std::max(f + decrease, std::numeric_limits<double>::min())) break;
    }
}

// Unit squares of the grid spanned by two axes, as four edge indices in cycle
// order: a -> a+s, a+s -> a+s+t, (a+t -> a+s+t) reversed, (a -> a+t) reversed.
inline std::vector<std::array<std::size_t, 4>> plaquettes(const GridFunction& g, const std::vector<Edge>& edges)
{
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> edge_of(g.node_count() * g.m, none);
    for (std::size_t e = 0; e < edges.size(); ++e) edge_of[edges[e].a * g.m + edges[e].axis] = e;
    std::vector<std::array<std::size_t, 4>> out;
    for (std::size_t k = 0; k < g.node_count(); ++k)
        for (std::size_t s = 0; s < g.m; ++s)
            for (std::size_t t = s + 1; t < g.m; ++t) {
                const std::size_t e1 = edge_of[k * g.m + s], e4 = edge_of[k * g.m + t];
                if (e1 == none || e4 == none) continue;
                const std::size_t e2 = edge_of[(k + g.stride(s)) * g.m + t];
                const std::size_t e3 = edge_of[(k + g.stride(t)) * g.m + s];
                if (e2 == none || e3 == none) continue;
                out.push_back({e1, e2, e3, e4});
            }
    return out;
}

inline bool has_holonomy(const std::array<std::size_t, 4>& pl, const std::vector<FrozenEdge>& frozen, std::size_t Q)
{
    auto inverse_at = [](const std::vector<std::size_t>& perm, std::size_t j) {
        return static_cast<std::size_t>(std::find(perm.begin(), perm.end(), j) - perm.begin());
    };
    for (std::size_t i = 0; i < Q; ++i) {
        std::size_t j = frozen[pl[0]].perm[i];
        j = frozen[pl[1]].perm[j];
        j = inverse_at(frozen[pl[2]].perm, j);
        j = inverse_at(frozen[pl[3]].perm, j);
        if (j != i) return true;
    }
    return false;
}

inline void require_boundary_reachable(const GridFunction& g)
{
    std::vector<bool> seen(g.node_count(), false);
    for (std::size_t s = 0; s < g.node_count(); ++s) {
        if (g.mask[s] != NodeKind::interior || seen[s]) continue;
        bool boundary = false;
        std::deque<std::size_t> queue{s};
        seen[s] = true;
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t w : g.neighbours(u)) {
                if (g.mask[w] == NodeKind::boundary) boundary = true;
                if (g.mask[w] != NodeKind::interior || seen[w]) continue;
                seen[w] = true;
                queue.push_back(w);
            }
        }
        if (!boundary)
            throw InvalidInput("solve_dirichlet: interior node " + std::to_string(s) +
                               " lies in a component without boundary nodes");
    }
}

/// Interior values from the boundary values: Whitney extension (m <= 2) or
/// the nearest boundary node.
inline GridFunction initial_guess(const GridFunction& problem, InitMethod method)
{
    GridFunction g = problem;
    std::vector<Point> locs;
    std::vector<QTuple> vals;
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.mask[k] == NodeKind::boundary) {
            locs.push_back(g.location(k));
            vals.push_back(g.values[k]);
        }
    if (locs.empty()) throw InvalidInput("solve_dirichlet: grid has no boundary nodes");
    if (method == InitMethod::whitney && g.m <= 2) {
        const WhitneyExtension ext(locs, vals, grid_box(g), whitney_depth_for(g));
        for (std::size_t k = 0; k < g.node_count(); ++k)
            if (g.mask[k] == NodeKind::interior) g.values[k] = ext(g.location(k));
        return g;
    }
    for (std::size_t k = 0; k < g.node_count(); ++k) {
        if (g.mask[k] != NodeKind::interior) continue;
        const Point x = g.location(k);
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < locs.size(); ++j) {
            const double d = squared_distance(x, locs[j]);
            if (d < bd) {
                bd = d;
                best = j;
            }
        }
        g.values[k] = vals[best];
    }
    return g;
}

} // namespace detail

/// Minimises the discrete p-energy over the interior values of `problem`
/// with its boundary values held fixed.
inline DirichletResult solve_dirichlet(const GridFunction& problem, const DirichletOptions& opt = {})
{
    problem.validate();
    if (!(std::isfinite(opt.p) && opt.p > 1.0 && opt.p <= opt.max_p))
        throw InvalidInput("solve_dirichlet: p = " + std::to_string(opt.p) + " outside (1, " +
                           std::to_string(opt.max_p) + "]");
    if (opt.inner == InnerSolver::p2_linear && opt.p != 2.0)
        throw InvalidInput("solve_dirichlet: the linear inner solver requires p = 2");
    detail::require(opt.restarts >= 1, "solve_dirichlet: restarts must be at least 1");
    detail::require_boundary_reachable(problem);
    const bool linear = opt.inner == InnerSolver::p2_linear || (opt.inner == InnerSolver::automatic && opt.p == 2.0);

    const GridFunction start = detail::initial_guess(problem, opt.init);
    const auto grid_edges = start.edges();

    // Perturbation size for restarts: a quarter of the spread of the boundary values.
    double spread = 0.0;
    for (std::size_t j = 0; j < start.n; ++j) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (std::size_t k = 0; k < start.node_count(); ++k) {
            if (start.mask[k] != NodeKind::boundary) continue;
            for (std::size_t i = 0; i < start.Q; ++i) {
                lo = std::min(lo, start.values[k].point(i)[j]);
                hi = std::max(hi, start.values[k].point(i)[j]);
            }
        }
        spread = std::max(spread, hi - lo);
    }

    const auto squares = start.Q > 1 ? detail::plaquettes(start, grid_edges) : std::vector<std::array<std::size_t, 4>>{};

    Rng rng(opt.seed);
    DirichletResult best;
    double best_energy = std::numeric_limits<double>::infinity();
    const std::size_t runs = start.Q == 1 ? 1 : opt.restarts;
    for (std::size_t run = 0; run < runs; ++run) {
        detail::Lifted L(start);
        if (run > 0)
            for (double& v : L.x()) v += rng.uniform(-0.25 * spread, 0.25 * spread);

        GridFunction current = L.materialize(L.x());
        double energy = discrete_energy(current, opt.p).total;
        if (!std::isfinite(energy)) throw NumericError("solve_dirichlet: initial energy is not finite");
        std::vector<double> history{energy};
        bool converged = false;
        std::size_t outer = 0;
        std::vector<detail::FrozenEdge> frozen(grid_edges.size());

        auto freeze = [&] {
            parallel_for(grid_edges.size(), [&](std::size_t e) {
                const Edge& ed = grid_edges[e];
                frozen[e] = {ed.a, ed.b, dist(current.values[ed.a], current.values[ed.b], MetricKind::G2).match.perm};
            });
        };
        auto inner = [&](detail::Lifted& lifted, const std::vector<detail::FrozenEdge>& fz) {
            if (linear)
                detail::solve_p2(lifted, start, fz, opt.linear_tol);
            else
                detail::solve_gradient(lifted, start, fz, opt.p, opt.tol, opt.max_inner);
        };
        auto alternate = [&] {
            converged = false;
            while (outer < opt.max_outer) {
                ++outer;
                freeze();
                const std::vector<double> previous = L.x();
                inner(L, frozen);
                GridFunction next = L.materialize(L.x());
                const double next_energy = discrete_energy(next, opt.p).total;
                if (!std::isfinite(next_energy)) throw NumericError("solve_dirichlet: energy became non-finite");
                if (next_energy > energy) {
                    // Round-off in the inner solve; keep the previous iterate.
                    L.x() = previous;
                    converged = true;
                    return;
                }
                const double decrease = energy - next_energy;
                current = std::move(next);
                energy = next_energy;
                history.push_back(energy);
                if (decrease < opt.tol * (1.0 + energy)) {
                    converged = true;
                    return;
                }
            }
        };

        alternate();
        std::size_t moves = 0;
        for (bool improved = true; improved && moves < opt.defect_moves && outer < opt.max_outer;) {
            improved = false;
            freeze();
            std::vector<std::size_t> candidates;
            for (const auto& sq : squares)
                if (detail::has_holonomy(sq, frozen, start.Q)) candidates.insert(candidates.end(), sq.begin(), sq.end());
            std::sort(candidates.begin(), candidates.end());
            candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
            for (std::size_t e : candidates) {
                for (std::size_t i = 0; i < start.Q && !improved; ++i)
                    for (std::size_t j = i + 1; j < start.Q && !improved; ++j) {
                        std::vector<detail::FrozenEdge> trial_edges = frozen;
                        std::swap(trial_edges[e].perm[i], trial_edges[e].perm[j]);
                        detail::Lifted trial(start);
                        trial.x() = L.x();
                        inner(trial, trial_edges);
                        GridFunction next = trial.materialize(trial.x());
                        const double next_energy = discrete_energy(next, opt.p).total;
                        if (next_energy < energy - opt.tol * (1.0 + energy)) {
                            L.x() = trial.x();
                            current = std::move(next);
                            energy = next_energy;
                            history.push_back(energy);
                            improved = true;
                        }
                    }
                if (improved) break;
            }
            if (improved) {
                ++moves;
                ++outer;
                alternate();
            }
        }

        best.run_energy.push_back(energy);
        if (energy < best_energy) {
            best_energy = energy;
            best.solution = current;
            best.history = history;
            best.best_run = run;
            best.defect_moves = moves;
            best.report = discrete_energy(current, opt.p);
            best.report.iterations = outer;
            best.report.converged = converged;
        }
    }
    return best;
}

} // namespace qv
