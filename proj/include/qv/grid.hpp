#pragma once

// Q-valued functions sampled on regular grids.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qv/qtuple.hpp"

namespace qv {

enum class NodeKind : std::uint8_t { interior = 0, boundary = 1, outside = 2 };

struct Edge {
    std::size_t a = 0; ///< lower node along the axis
    std::size_t b = 0; ///< a + stride(axis)
    std::size_t axis = 0;
    friend bool operator==(const Edge&, const Edge&) = default;
};

/// A Q-valued map on a regular grid in R^m. Node k sits at
/// origin + h * multi_index(k); the last axis varies fastest. Outside
/// nodes carry Q[[0]] and take no part in any computation.
struct GridFunction {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t Q = 0;
    std::vector<std::size_t> shape;
    double h = 1.0;
    std::vector<double> origin;
    std::vector<NodeKind> mask;
    std::vector<QTuple> values;

    std::size_t node_count() const
    {
        std::size_t c = 1;
        for (std::size_t s : shape) c *= s;
        return c;
    }

    std::size_t stride(std::size_t axis) const
    {
        std::size_t s = 1;
        for (std::size_t a = axis + 1; a < m; ++a) s *= shape[a];
        return s;
    }

    std::vector<std::size_t> multi_index(std::size_t node) const
    {
        std::vector<std::size_t> idx(m);
        for (std::size_t a = m; a-- > 0;) {
            idx[a] = node % shape[a];
            node /= shape[a];
        }
        return idx;
    }

    std::size_t linear(std::span<const std::size_t> idx) const
    {
        std::size_t k = 0;
        for (std::size_t a = 0; a < m; ++a) k = k * shape[a] + idx[a];
        return k;
    }

    std::vector<double> location(std::size_t node) const
    {
        auto idx = multi_index(node);
        std::vector<double> x(m);
        for (std::size_t a = 0; a < m; ++a) x[a] = origin[a] + h * static_cast<double>(idx[a]);
        return x;
    }

    bool active(std::size_t node) const { return mask[node] != NodeKind::outside; }

    /// Axis-adjacent pairs of non-outside nodes, each listed once.
    std::vector<Edge> edges() const
    {
        std::vector<Edge> out;
        const std::size_t total = node_count();
        for (std::size_t k = 0; k < total; ++k) {
            if (!active(k)) continue;
            auto idx = multi_index(k);
            for (std::size_t a = 0; a < m; ++a) {
                if (idx[a] + 1 >= shape[a]) continue;
                const std::size_t nb = k + stride(a);
                if (active(nb)) out.push_back({k, nb, a});
            }
        }
        return out;
    }

    /// Non-outside axis neighbours of a node.
    std::vector<std::size_t> neighbours(std::size_t node) const
    {
        std::vector<std::size_t> out;
        auto idx = multi_index(node);
        for (std::size_t a = 0; a < m; ++a) {
            const std::size_t s = stride(a);
            if (idx[a] > 0 && active(node - s)) out.push_back(node - s);
            if (idx[a] + 1 < shape[a] && active(node + s)) out.push_back(node + s);
        }
        return out;
    }

    std::size_t count(NodeKind kind) const
    {
        std::size_t c = 0;
        for (NodeKind k : mask) c += (k == kind);
        return c;
    }

    /// Throws InvalidInput describing the first violated structural invariant.
    void validate() const
    {
        detail::require(m >= 1, "grid: m must be positive");
        detail::require(n >= 1 && Q >= 1, "grid: n and Q must be positive");
        detail::require(shape.size() == m, "grid: shape must have m entries");
        detail::require(origin.size() == m, "grid: origin must have m entries");
        detail::require(std::isfinite(h) && h > 0.0, "grid: h must be positive");
        for (std::size_t s : shape) detail::require(s >= 1, "grid: shape entries must be positive");
        const std::size_t total = node_count();
        detail::require(mask.size() == total, "grid: mask size does not match shape");
        detail::require(values.size() == total, "grid: values size does not match shape");
        for (std::size_t k = 0; k < total; ++k) {
            if (!active(k)) continue;
            detail::require(values[k].Q() == Q && values[k].n() == n,
                            "grid: value at node " + std::to_string(k) + " has wrong Q or n");
            if (mask[k] != NodeKind::interior) continue;
            auto idx = multi_index(k);
            for (std::size_t a = 0; a < m; ++a) {
                const std::size_t s = stride(a);
                const bool ok = idx[a] > 0 && idx[a] + 1 < shape[a] && active(k - s) && active(k + s);
                detail::require(ok, "grid: interior node " + std::to_string(k) +
                                        " has a missing or outside neighbour");
            }
        }
    }

    bool same_layout(const GridFunction& o) const
    {
        return m == o.m && n == o.n && Q == o.Q && shape == o.shape && h == o.h && origin == o.origin &&
               mask == o.mask;
    }
};

/// Hypercube grid with `per_axis` nodes on [lo, hi]^m; the outer layer of
/// nodes is boundary, the rest interior. Values default to Q[[0]].
inline GridFunction make_box_grid(std::size_t m, std::size_t per_axis, double lo, double hi, std::size_t Q,
                                  std::size_t n)
{
    detail::require(per_axis >= 2, "box grid: need at least 2 nodes per axis");
    detail::require(hi > lo, "box grid: empty interval");
    GridFunction g;
    g.m = m;
    g.n = n;
    g.Q = Q;
    g.shape.assign(m, per_axis);
    g.h = (hi - lo) / static_cast<double>(per_axis - 1);
    g.origin.assign(m, lo);
    const std::size_t total = g.node_count();
    g.mask.assign(total, NodeKind::interior);
    g.values.assign(total, QTuple::zero(Q, n));
    for (std::size_t k = 0; k < total; ++k) {
        auto idx = g.multi_index(k);
        for (std::size_t a = 0; a < m; ++a)
            if (idx[a] == 0 || idx[a] + 1 == per_axis) g.mask[k] = NodeKind::boundary;
    }
    return g;
}

/// Ball of radius R masked on the grid with `per_axis` nodes on [-R, R]^m.
/// Interior: |x| < R. Boundary: remaining nodes axis-adjacent to an interior
/// node. Everything else is outside.
inline GridFunction make_ball_grid(std::size_t m, std::size_t per_axis, double R, std::size_t Q, std::size_t n)
{
    GridFunction g = make_box_grid(m, per_axis, -R, R, Q, n);
    const std::size_t total = g.node_count();
    for (std::size_t k = 0; k < total; ++k) {
        auto x = g.location(k);
        g.mask[k] = detail::norm(x) < R ? NodeKind::interior : NodeKind::outside;
    }
    for (std::size_t k = 0; k < total; ++k) {
        if (g.mask[k] != NodeKind::outside) continue;
        auto idx = g.multi_index(k);
        for (std::size_t a = 0; a < m && g.mask[k] == NodeKind::outside; ++a) {
            const std::size_t s = g.stride(a);
            if (idx[a] > 0 && g.mask[k - s] == NodeKind::interior) g.mask[k] = NodeKind::boundary;
            if (idx[a] + 1 < per_axis && g.mask[k + s] == NodeKind::interior) g.mask[k] = NodeKind::boundary;
        }
    }
    return g;
}

/// Assigns f(location) to every non-outside node.
inline void fill(GridFunction& g, const std::function<QTuple(std::span<const double>)>& f)
{
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.active(k)) g.values[k] = f(g.location(k));
}

} // namespace qv
