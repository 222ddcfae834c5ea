#pragma once

// Decomposition of a grid-sampled Q-valued map into Q single-valued fields.

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "qv/grid.hpp"
#include "qv/qspace.hpp"

namespace qv {

struct BranchSelection {
    /// branches[i][node] is the point of branch i at that node (n coordinates);
    /// empty for outside nodes.
    std::vector<std::vector<Point>> branches;
    /// Nodes whose numbering fell back to lexicographic order because the
    /// matched distance to the propagating neighbour exceeded half its
    /// splitting distance.
    std::vector<std::size_t> fallback_nodes;
    /// Edges across which the selected numbering disagrees with an optimal
    /// G2 matching, i.e. where the selection is discontinuous.
    std::vector<Edge> discontinuous_edges;
};

/// Breadth-first region growing from the first active node of each connected
/// component. Labels propagate along the optimal G2 matching; a collision
/// (G2 distance above half the splitting distance of the labelled node)
/// restarts the numbering in lexicographic order at the new node.
inline BranchSelection select_branches(const GridFunction& f)
{
    f.validate();
    const std::size_t total = f.node_count();
    const std::size_t q = f.Q;
    std::vector<QTuple> labelled(total);
    std::vector<bool> seen(total, false);
    BranchSelection out;

    for (std::size_t seed = 0; seed < total; ++seed) {
        if (!f.active(seed) || seen[seed]) continue;
        labelled[seed] = f.values[seed].canonical();
        seen[seed] = true;
        std::deque<std::size_t> queue{seed};
        while (!queue.empty()) {
            const std::size_t u = queue.front();
            queue.pop_front();
            const double half_split = split_distance(labelled[u]) / 2.0;
            for (std::size_t w : f.neighbours(u)) {
                if (seen[w]) continue;
                seen[w] = true;
                queue.push_back(w);
                const DistResult d = dist(labelled[u], f.values[w], MetricKind::G2);
                if (d.value > half_split) {
                    labelled[w] = f.values[w].canonical();
                    out.fallback_nodes.push_back(w);
                } else {
                    labelled[w] = f.values[w].reordered(d.match.perm);
                }
            }
        }
    }

    out.branches.assign(q, std::vector<Point>(total));
    for (std::size_t k = 0; k < total; ++k) {
        if (!f.active(k)) continue;
        for (std::size_t i = 0; i < q; ++i) {
            auto p = labelled[k].point(i);
            out.branches[i][k].assign(p.begin(), p.end());
        }
    }

    for (const Edge& e : f.edges()) {
        const QTuple& a = labelled[e.a];
        const QTuple& b = labelled[e.b];
        const double optimal = dist(a, b, MetricKind::G2).value;
        std::vector<double> sq(q);
        for (std::size_t i = 0; i < q; ++i) sq[i] = detail::squared_distance(a.point(i), b.point(i));
        std::sort(sq.begin(), sq.end());
        double s = 0.0;
        for (double x : sq) s += x;
        const double labelled_cost = std::sqrt(s);
        if (labelled_cost > optimal * (1.0 + 1e-12) + 1e-300) out.discontinuous_edges.push_back(e);
    }
    return out;
}

} // namespace qv
