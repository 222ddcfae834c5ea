#pragma once

// Square assignment problems on Q x Q cost matrices (row-major).

#include <algorithm>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace qv::assignment {

struct Result {
    std::vector<std::size_t> perm; ///< row i is assigned column perm[i]
    double value = 0.0;            ///< canonical sum (min-sum) or maximum (bottleneck)
};

/// Sum of the assigned entries, added in ascending order. Two permutations
/// that pick the same multiset of entries get bit-identical sums.
inline double canonical_sum(std::span<const double> cost, std::size_t q, std::span<const std::size_t> perm)
{
    std::vector<double> picked(q);
    for (std::size_t i = 0; i < q; ++i) picked[i] = cost[i * q + perm[i]];
    std::sort(picked.begin(), picked.end());
    double s = 0.0;
    for (double c : picked) s += c;
    return s;
}

/// Hungarian method with potentials, O(k^3). rows/cols select a k x k
/// submatrix of the q x q matrix; returns, for each selected row, the
/// position (into cols) of its assigned column.
inline std::vector<std::size_t> hungarian(std::span<const double> cost, std::size_t q,
                                          std::span<const std::size_t> rows, std::span<const std::size_t> cols)
{
    const std::size_t k = rows.size();
    constexpr double inf = std::numeric_limits<double>::infinity();
    auto a = [&](std::size_t i, std::size_t j) { return cost[rows[i - 1] * q + cols[j - 1]]; };

    std::vector<double> u(k + 1, 0.0), v(k + 1, 0.0), minv(k + 1);
    std::vector<std::size_t> p(k + 1, 0), way(k + 1, 0);
    std::vector<bool> used(k + 1);
    for (std::size_t i = 1; i <= k; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), false);
        do {
            used[j0] = true;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= k; ++j) {
                if (used[j]) continue;
                const double cur = a(i0, j) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= k; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<std::size_t> assign(k);
    for (std::size_t j = 1; j <= k; ++j) assign[p[j] - 1] = j - 1;
    return assign;
}

inline std::vector<std::size_t> hungarian(std::span<const double> cost, std::size_t q)
{
    std::vector<std::size_t> all(q);
    for (std::size_t i = 0; i < q; ++i) all[i] = i;
    auto pos = hungarian(cost, q, all, all);
    return pos;
}

/// Above this size the lexicographic tie refinement (O(Q^5)) is skipped and
/// the plain Hungarian optimum is returned.
inline constexpr std::size_t lex_refine_limit = 12;

/// Minimum-sum assignment; among optimal permutations the lexicographically
/// smallest one is returned.
inline Result min_sum(std::span<const double> cost, std::size_t q)
{
    Result r;
    if (q == 1) {
        r.perm = {0};
        r.value = cost[0];
        return r;
    }
    std::vector<std::size_t> best = hungarian(cost, q);
    double best_value = canonical_sum(cost, q, best);
    if (q > lex_refine_limit) {
        r.perm = std::move(best);
        r.value = best_value;
        return r;
    }

    std::vector<std::size_t> prefix;
    std::vector<bool> used(q, false);
    for (std::size_t i = 0; i < q; ++i) {
        bool accepted = false;
        for (std::size_t j = 0; j < q && !accepted; ++j) {
            if (used[j]) continue;
            std::vector<std::size_t> cand = prefix;
            cand.push_back(j);
            if (i + 1 < q) {
                std::vector<std::size_t> rows, cols;
                for (std::size_t r2 = i + 1; r2 < q; ++r2) rows.push_back(r2);
                for (std::size_t c = 0; c < q; ++c)
                    if (!used[c] && c != j) cols.push_back(c);
                auto sub = hungarian(cost, q, rows, cols);
                for (std::size_t s : sub) cand.push_back(cols[s]);
            }
            const double value = canonical_sum(cost, q, cand);
            if (value <= best_value) {
                best_value = value;
                best = std::move(cand);
                accepted = true;
            }
        }
        // The incumbent always extends the current prefix.
        prefix.push_back(best[i]);
        used[best[i]] = true;
    }
    r.perm = std::move(best);
    r.value = best_value;
    return r;
}

namespace detail {

// Kuhn's augmenting paths on the threshold graph restricted to free rows/cols.
inline bool augment(std::size_t row, std::span<const double> cost, std::size_t q, double threshold,
                    const std::vector<bool>& col_free, std::vector<bool>& visited, std::vector<std::size_t>& owner)
{
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    for (std::size_t c = 0; c < q; ++c) {
        if (!col_free[c] || visited[c] || cost[row * q + c] > threshold) continue;
        visited[c] = true;
        if (owner[c] == none || augment(owner[c], cost, q, threshold, col_free, visited, owner)) {
            owner[c] = row;
            return true;
        }
    }
    return false;
}

inline bool perfect_matching_exists(std::span<const double> cost, std::size_t q, double threshold,
                                    std::span<const std::size_t> free_rows, const std::vector<bool>& col_free)
{
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(q, none);
    std::vector<bool> visited(q);
    for (std::size_t r : free_rows) {
        std::fill(visited.begin(), visited.end(), false);
        if (!augment(r, cost, q, threshold, col_free, visited, owner)) return false;
    }
    return true;
}

} // namespace detail

/// Bottleneck assignment: minimises the largest assigned entry. The threshold
/// is found by bisection over the sorted entries with a bipartite-matching
/// feasibility test; the lexicographically smallest feasible permutation is
/// returned.
inline Result bottleneck(std::span<const double> cost, std::size_t q)
{
    Result r;
    if (q == 1) {
        r.perm = {0};
        r.value = cost[0];
        return r;
    }
    std::vector<double> levels(cost.begin(), cost.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    std::vector<std::size_t> all(q);
    for (std::size_t i = 0; i < q; ++i) all[i] = i;
    const std::vector<bool> all_cols(q, true);

    std::size_t lo = 0, hi = levels.size() - 1;
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (detail::perfect_matching_exists(cost, q, levels[mid], all, all_cols))
            hi = mid;
        else
            lo = mid + 1;
    }
    const double threshold = levels[lo];

    std::vector<bool> col_free(q, true);
    r.perm.assign(q, 0);
    for (std::size_t i = 0; i < q; ++i) {
        std::vector<std::size_t> rest;
        for (std::size_t r2 = i + 1; r2 < q; ++r2) rest.push_back(r2);
        for (std::size_t j = 0; j < q; ++j) {
            if (!col_free[j] || cost[i * q + j] > threshold) continue;
            col_free[j] = false;
            if (detail::perfect_matching_exists(cost, q, threshold, rest, col_free)) {
                r.perm[i] = j;
                break;
            }
            col_free[j] = true;
        }
    }
    r.value = 0.0;
    for (std::size_t i = 0; i < q; ++i) r.value = std::max(r.value, cost[i * q + r.perm[i]]);
    return r;
}

} // namespace qv::assignment
