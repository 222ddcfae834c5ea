#pragma once

// Bounds on the dual (Lipschitz-functional) norm of zeta(v) - zeta(w), where
// zeta(v)(u) = sum_i u(y_i) for Lipschitz u vanishing at a basepoint.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "qv/qspace.hpp"

namespace qv {

struct ZetaGap {
    double lower = 0.0; ///< best value over the anchor dictionary
    double upper = 0.0; ///< G1(v, w)
};

namespace detail {

inline double anchor_sum(const QTuple& v, std::span<const double> a)
{
    std::vector<double> d(v.Q());
    for (std::size_t i = 0; i < v.Q(); ++i) d[i] = distance(v.point(i), a);
    std::sort(d.begin(), d.end());
    double s = 0.0;
    for (double x : d) s += x;
    return s;
}

} // namespace detail

/// Evaluates the 1-Lipschitz functions u_a(y) = |y - a| - |a - y0| on both
/// tuples. Anchors are the points of v and w plus dictionary_size uniform
/// draws from the bounding box of v and w enlarged by 1. The basepoint terms
/// cancel (both tuples have Q points), so y0 only fixes the normalisation.
inline ZetaGap zeta_dual_gap(const QTuple& v, const QTuple& w, std::size_t dictionary_size,
                             std::span<const double> basepoint, std::uint64_t seed = 0)
{
    detail::require_compatible(v, w, "zeta_dual_gap");
    if (basepoint.size() != v.n()) throw InvalidInput("zeta_dual_gap: basepoint has wrong dimension");

    ZetaGap out;
    out.upper = distance(v, w, MetricKind::G1);

    auto consider = [&](std::span<const double> a) {
        const double gap = std::abs(detail::anchor_sum(v, a) - detail::anchor_sum(w, a));
        out.lower = std::max(out.lower, gap);
    };
    for (std::size_t i = 0; i < v.Q(); ++i) consider(v.point(i));
    for (std::size_t i = 0; i < w.Q(); ++i) consider(w.point(i));

    const std::size_t n = v.n();
    Point lo(n), hi(n);
    for (std::size_t j = 0; j < n; ++j) {
        lo[j] = hi[j] = v.point(0)[j];
        for (const QTuple* t : {&v, &w})
            for (std::size_t i = 0; i < t->Q(); ++i) {
                lo[j] = std::min(lo[j], t->point(i)[j]);
                hi[j] = std::max(hi[j], t->point(i)[j]);
            }
        lo[j] -= 1.0;
        hi[j] += 1.0;
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Point a(n);
    for (std::size_t k = 0; k < dictionary_size; ++k) {
        for (std::size_t j = 0; j < n; ++j) a[j] = lo[j] + (hi[j] - lo[j]) * unit(rng);
        consider(a);
    }
    return out;
}

} // namespace qv
