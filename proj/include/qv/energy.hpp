#pragma once

// Discrete Sobolev quantities for grid-sampled Q-valued maps.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qv/extend.hpp"
#include "qv/grid.hpp"
#include "qv/parallel.hpp"
#include "qv/qspace.hpp"

namespace qv {

namespace detail {

/// x^p with the square computed exactly, so p = 2 stays monotone bit for bit.
inline double power(double x, double p) { return p == 2.0 ? x * x : std::pow(x, p); }

inline void require_exponent(double p, double lo, const char* op)
{
    if (!(std::isfinite(p) && p >= lo))
        throw InvalidInput(std::string(op) + ": exponent p = " + std::to_string(p) + " out of range");
}

} // namespace detail

/// (sum over non-outside nodes of G2(f, g)^p h^m)^(1/p).
inline double dp_distance(const GridFunction& f, const GridFunction& g, double p)
{
    f.validate();
    g.validate();
    detail::require(f.same_layout(g), "dp_distance: grid functions differ in layout");
    detail::require_exponent(p, 1.0, "dp_distance");
    const double vol = std::pow(f.h, static_cast<double>(f.m));
    double s = 0.0;
    for (std::size_t k = 0; k < f.node_count(); ++k)
        if (f.active(k)) s += detail::power(distance(f.values[k], g.values[k], MetricKind::G2), p) * vol;
    return std::pow(s, 1.0 / p);
}

struct EdgeTerm {
    Edge edge;
    double contribution = 0.0; ///< h^m (G2 / h)^p
    Matching match;            ///< f(edge.a).point(i) pairs with f(edge.b).point(match.perm[i])
};

struct EnergyReport {
    double total = 0.0;
    std::vector<EdgeTerm> per_edge;
    double p = 2.0;
    std::size_t iterations = 0;
    bool converged = true;
};

/// Sum over axis edges between non-outside nodes of h^m (G2(f(a), f(b)) / h)^p.
inline EnergyReport discrete_energy(const GridFunction& f, double p)
{
    f.validate();
    if (!(std::isfinite(p) && p > 1.0)) throw InvalidInput("discrete_energy: p must exceed 1");
    EnergyReport r;
    r.p = p;
    const auto edges = f.edges();
    r.per_edge.resize(edges.size());
    const double vol = std::pow(f.h, static_cast<double>(f.m));
    parallel_for(edges.size(), [&](std::size_t e) {
        const DistResult d = dist(f.values[edges[e].a], f.values[edges[e].b], MetricKind::G2);
        r.per_edge[e] = {edges[e], vol * detail::power(d.value / f.h, p), d.match};
    });
    for (const auto& t : r.per_edge) r.total += t.contribution;
    return r;
}

/// Keeps the first n_keep coordinates of every point.
inline GridFunction truncate_coords(const GridFunction& f, std::size_t n_keep)
{
    f.validate();
    if (n_keep < 1 || n_keep > f.n)
        throw InvalidInput("truncate_coords: n_keep must lie in [1, " + std::to_string(f.n) + "]");
    GridFunction g = f;
    g.n = n_keep;
    for (std::size_t k = 0; k < f.node_count(); ++k) {
        const QTuple& v = f.values[k];
        std::vector<double> c;
        c.reserve(v.Q() * n_keep);
        for (std::size_t i = 0; i < v.Q(); ++i) c.insert(c.end(), v.point(i).begin(), v.point(i).begin() + n_keep);
        g.values[k] = QTuple(v.Q(), n_keep, std::move(c));
    }
    return g;
}

/// Restriction of a grid function to its boundary nodes.
struct Trace {
    std::vector<std::size_t> nodes;
    std::vector<Point> locations;
    std::vector<QTuple> values;
};

inline Trace trace(const GridFunction& f)
{
    f.validate();
    Trace t;
    for (std::size_t k = 0; k < f.node_count(); ++k) {
        if (f.mask[k] != NodeKind::boundary) continue;
        t.nodes.push_back(k);
        t.locations.push_back(f.location(k));
        t.values.push_back(f.values[k]);
    }
    if (t.nodes.empty()) throw InvalidInput("trace: grid has no boundary nodes");
    return t;
}

/// Largest edge difference quotient G2(f(a), f(b)) / h.
inline double lipschitz_constant(const GridFunction& f)
{
    double lip = 0.0;
    for (const Edge& e : f.edges()) lip = std::max(lip, distance(f.values[e.a], f.values[e.b], MetricKind::G2) / f.h);
    return lip;
}

struct TruncationResult {
    GridFunction h;
    std::vector<std::size_t> kept;
    double lipschitz = 0.0; ///< measured edge Lipschitz constant of h
    double constant = 0.0;  ///< lipschitz / t
};

namespace detail {

inline std::size_t whitney_depth_for(const GridFunction& f)
{
    double side = 0.0;
    for (std::size_t a = 0; a < f.m; ++a) side = std::max(side, f.h * static_cast<double>(f.shape[a] - 1));
    const double ratio = side / f.h;
    const auto d = static_cast<std::size_t>(std::ceil(std::log2(std::max(ratio, 1.0)))) + 2;
    return std::min(d, whitney_max_depth);
}

inline Box grid_box(const GridFunction& f)
{
    Box b{f.origin, f.origin};
    for (std::size_t a = 0; a < f.m; ++a) b.hi[a] += f.h * static_cast<double>(f.shape[a] - 1);
    return b;
}

} // namespace detail

/// Keeps the nodes where |f|^p + (largest incident edge quotient)^p <= t^p,
/// where |f| = G2(f, Q[[0]]), and refills the other non-outside nodes from
/// the kept ones: by the Whitney extension for m <= 2, by the nearest kept
/// node otherwise. With nothing kept the result is Q[[0]] everywhere.
inline TruncationResult lipschitz_truncation(const GridFunction& f, double t, double p = 2.0)
{
    f.validate();
    if (!(std::isfinite(t) && t > 0.0)) throw InvalidInput("lipschitz_truncation: t must be positive");
    detail::require_exponent(p, 1.0, "lipschitz_truncation");
    const std::size_t total = f.node_count();
    std::vector<double> quotient(total, 0.0);
    for (const Edge& e : f.edges()) {
        const double q = distance(f.values[e.a], f.values[e.b], MetricKind::G2) / f.h;
        quotient[e.a] = std::max(quotient[e.a], q);
        quotient[e.b] = std::max(quotient[e.b], q);
    }
    const QTuple zero = QTuple::zero(f.Q, f.n);
    TruncationResult out;
    out.h = f;
    for (std::size_t k = 0; k < total; ++k) {
        if (!f.active(k)) continue;
        const double size = distance(f.values[k], zero, MetricKind::G2);
        if (detail::power(size, p) + detail::power(quotient[k], p) <= detail::power(t, p)) out.kept.push_back(k);
    }

    std::vector<bool> kept(total, false);
    for (std::size_t k : out.kept) kept[k] = true;
    if (out.kept.empty()) {
        for (std::size_t k = 0; k < total; ++k)
            if (f.active(k)) out.h.values[k] = zero;
    } else if (out.kept.size() < f.count(NodeKind::interior) + f.count(NodeKind::boundary)) {
        std::vector<Point> locs;
        std::vector<QTuple> vals;
        for (std::size_t k : out.kept) {
            locs.push_back(f.location(k));
            vals.push_back(f.values[k]);
        }
        if (f.m <= 2) {
            const WhitneyExtension ext(locs, vals, detail::grid_box(f), detail::whitney_depth_for(f));
            for (std::size_t k = 0; k < total; ++k)
                if (f.active(k) && !kept[k]) out.h.values[k] = ext(f.location(k));
        } else {
            for (std::size_t k = 0; k < total; ++k) {
                if (!f.active(k) || kept[k]) continue;
                const Point x = f.location(k);
                std::size_t best = 0;
                double bd = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < locs.size(); ++j) {
                    const double d = detail::squared_distance(x, locs[j]);
                    if (d < bd) {
                        bd = d;
                        best = j;
                    }
                }
                out.h.values[k] = vals[best];
            }
        }
    }
    out.lipschitz = lipschitz_constant(out.h);
    out.constant = out.lipschitz / t;
    return out;
}

} // namespace qv
