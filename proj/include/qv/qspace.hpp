#pragma once

// Assignment metrics on Q-tuples, splitting distance, concatenation and
// the local splitting of a tuple near a reference tuple.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "qv/assignment.hpp"
#include "qv/qtuple.hpp"

namespace qv {

struct DistResult {
    double value = 0.0;
    Matching match; ///< v.point(i) is paired with w.point(match.perm[i])
};

namespace detail {

inline std::vector<double> pair_costs(const QTuple& v, const QTuple& w, bool squared)
{
    const std::size_t q = v.Q();
    std::vector<double> cost(q * q);
    for (std::size_t i = 0; i < q; ++i)
        for (std::size_t j = 0; j < q; ++j) {
            const double s = squared_distance(v.point(i), w.point(j));
            cost[i * q + j] = squared ? s : std::sqrt(s);
        }
    return cost;
}

} // namespace detail

/// G1, G2 or G-infinity distance with an optimal matching attaining it.
/// Ties between optimal matchings resolve to the lexicographically smallest
/// permutation.
inline DistResult dist(const QTuple& v, const QTuple& w, MetricKind kind)
{
    detail::require_compatible(v, w, "dist");
    const std::size_t q = v.Q();
    DistResult out;
    switch (kind) {
    case MetricKind::G1: {
        auto r = assignment::min_sum(detail::pair_costs(v, w, false), q);
        out.value = r.value;
        out.match.perm = std::move(r.perm);
        break;
    }
    case MetricKind::G2: {
        // Squared costs share the minimising permutation with the l2 aggregate.
        auto r = assignment::min_sum(detail::pair_costs(v, w, true), q);
        out.value = std::sqrt(r.value);
        out.match.perm = std::move(r.perm);
        break;
    }
    case MetricKind::GINF: {
        auto r = assignment::bottleneck(detail::pair_costs(v, w, false), q);
        out.value = r.value;
        out.match.perm = std::move(r.perm);
        break;
    }
    }
    return out;
}

inline double distance(const QTuple& v, const QTuple& w, MetricKind kind) { return dist(v, w, kind).value; }

/// G2 distance for n = 1 by pairing sorted values.
inline double dist_sorted_1d(const QTuple& v, const QTuple& w)
{
    detail::require_compatible(v, w, "dist_sorted_1d");
    if (v.n() != 1) throw InvalidInput("dist_sorted_1d: requires n == 1, got n = " + std::to_string(v.n()));
    std::vector<double> a(v.coords().begin(), v.coords().end());
    std::vector<double> b(w.coords().begin(), w.coords().end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::vector<double> sq(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) sq[i] = (a[i] - b[i]) * (a[i] - b[i]);
    std::sort(sq.begin(), sq.end());
    double s = 0.0;
    for (double x : sq) s += x;
    return std::sqrt(s);
}

/// Smallest distance between two distinct support points, +inf when the
/// support is a single point. Distinctness is exact coordinate equality.
inline double split_distance(const QTuple& v)
{
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.Q(); ++i)
        for (std::size_t j = i + 1; j < v.Q(); ++j) {
            auto a = v.point(i), b = v.point(j);
            if (std::equal(a.begin(), a.end(), b.begin())) continue;
            best = std::min(best, detail::distance(a, b));
        }
    return best;
}

/// v (+) w: the (v.Q + w.Q)-tuple listing the points of both.
inline QTuple concatenate(const QTuple& v, const QTuple& w)
{
    if (v.n() != w.n()) throw InvalidInput("concatenate: dimension mismatch");
    std::vector<double> c(v.coords().begin(), v.coords().end());
    c.insert(c.end(), w.coords().begin(), w.coords().end());
    return QTuple(v.Q() + w.Q(), v.n(), std::move(c));
}

struct Support {
    std::vector<Point> points;               ///< distinct points, lexicographic order
    std::vector<std::size_t> multiplicities; ///< sums to Q
    std::size_t sigma() const noexcept { return points.size(); }
};

inline Support support_sigma(const QTuple& v)
{
    Support s;
    const QTuple c = v.canonical();
    for (std::size_t i = 0; i < c.Q(); ++i) {
        auto p = c.point(i);
        if (!s.points.empty() && std::equal(p.begin(), p.end(), s.points.back().begin())) {
            ++s.multiplicities.back();
        } else {
            s.points.emplace_back(p.begin(), p.end());
            s.multiplicities.push_back(1);
        }
    }
    return s;
}

struct LocalSplit {
    std::vector<QTuple> parts; ///< one group per support point of the center
    /// Indices of v's points in group order; concatenating the parts lists
    /// v.point(assignment.perm[0]), v.point(assignment.perm[1]), ...
    Matching assignment;
};

/// Decomposes v along the support of center. Requires
/// G_inf(center, v) < split_distance(center) / 2; each group then collects
/// the points of v nearest to one support point of center.
inline LocalSplit local_split(const QTuple& center, const QTuple& v)
{
    detail::require_compatible(center, v, "local_split");
    const double split = split_distance(center);
    const DistResult d = dist(center, v, MetricKind::GINF);
    if (!(d.value < split / 2.0))
        throw SplitRadiusError("local_split: G_inf(center, v) = " + std::to_string(d.value) +
                               " is not below split(center)/2 = " + std::to_string(split / 2.0));

    const Support sup = support_sigma(center);
    LocalSplit out;
    for (std::size_t s = 0; s < sup.sigma(); ++s) {
        std::vector<double> c;
        for (std::size_t i = 0; i < center.Q(); ++i) {
            auto p = center.point(i);
            if (!std::equal(p.begin(), p.end(), sup.points[s].begin())) continue;
            const std::size_t k = d.match.perm[i];
            out.assignment.perm.push_back(k);
            auto y = v.point(k);
            c.insert(c.end(), y.begin(), y.end());
        }
        out.parts.emplace_back(sup.multiplicities[s], v.n(), std::move(c));
    }
    return out;
}

} // namespace qv
