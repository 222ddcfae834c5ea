#pragma once

// Randomised property checks for the inequalities and identities the library
// relies on. Every check owns a generator seeded from the config seed and its
// own name, so reports are reproducible bit for bit.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qv/embed.hpp"
#include "qv/energy.hpp"
#include "qv/extend.hpp"
#include "qv/grid.hpp"
#include "qv/qspace.hpp"
#include "qv/random.hpp"
#include "qv/zeta.hpp"

namespace qv {

using Range = std::pair<std::size_t, std::size_t>;

struct CheckConfig {
    std::uint64_t seed = 1;
    std::size_t trials = 200;
    Range Q_range{1, 4};
    Range n_range{1, 3};
    Range m_range{1, 2};
    /// Overrides keyed by check name; see each check for its default.
    std::map<std::string, double> tolerances;

    double tolerance(const std::string& name, double fallback) const
    {
        auto it = tolerances.find(name);
        return it == tolerances.end() ? fallback : it->second;
    }

    void validate() const
    {
        detail::require(trials >= 1, "check config: trials must be at least 1");
        for (const auto& [name, r] : {std::pair{"Q_range", Q_range}, {"n_range", n_range}, {"m_range", m_range}})
            detail::require(r.first >= 1 && r.first <= r.second,
                            std::string("check config: ") + name + " must be a nonempty range of positive integers");
        detail::require(m_range.second <= 3, "check config: m_range must stay within [1, 3]");
        for (const auto& [name, t] : tolerances)
            detail::require(std::isfinite(t) && t >= 0.0, "check config: tolerance '" + name + "' must be >= 0");
    }
};

struct CheckReport {
    static constexpr std::size_t max_witnesses = 5;

    CheckReport() = default;
    explicit CheckReport(std::string check_name) : name(std::move(check_name)) {}

    std::string name;
    std::size_t trials = 0;
    std::size_t failures = 0;
    /// Largest observed left side / right side of the asserted inequality.
    double worst_ratio = 0.0;
    std::vector<std::string> witnesses;
    /// Empirical constants (alpha, Poincare constant, ...).
    std::map<std::string, double> measured;

    bool passed() const noexcept { return failures == 0; }

    void fail(std::string witness)
    {
        ++failures;
        if (witnesses.size() < max_witnesses) witnesses.push_back(std::move(witness));
    }

    void ratio(double lhs, double rhs)
    {
        if (rhs > 0.0) worst_ratio = std::max(worst_ratio, lhs / rhs);
    }
};

namespace detail {

inline std::string text(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string text(std::span<const double> p)
{
    std::string s = "[";
    for (std::size_t j = 0; j < p.size(); ++j) s += (j ? "," : "") + text(p[j]);
    return s + "]";
}

inline std::string text(const QTuple& v)
{
    std::string s = "[";
    for (std::size_t i = 0; i < v.Q(); ++i) s += (i ? "," : "") + text(v.point(i));
    return s + "]";
}

/// Witness record as a JSON object text.
inline std::string witness(std::initializer_list<std::pair<const char*, std::string>> fields)
{
    std::string s = "{";
    bool first = true;
    for (const auto& [k, v] : fields) {
        s += (first ? "\"" : ",\"") + std::string(k) + "\":" + v;
        first = false;
    }
    return s + "}";
}

inline std::string quoted(const std::string& s) { return "\"" + s + "\""; }

inline Rng check_rng(const CheckConfig& cfg, const std::string& name)
{
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : name) h = (h ^ c) * 1099511628211ull;
    return Rng(cfg.seed ^ h);
}

inline std::size_t pick(Rng& rng, Range r) { return r.first + rng.index(r.second - r.first + 1); }

inline TupleOptions degenerate_tuples() { return {0.3, 1e-3, 0.15}; }

/// Smooth branches c + A x + a sin(w.x + phi) d, optionally a mirrored pair
/// (so branches collide) or a constant map; each node lists its points in a
/// numbering that changes across a random half-space.
inline GridFunction random_lipschitz_grid(Rng& rng, std::size_t m, std::size_t Q, std::size_t n)
{
    const std::size_t per_axis = m == 1 ? 33 : (m == 2 ? 9 : 5);
    GridFunction g = make_box_grid(m, per_axis, -1.0, 1.0, Q, n);
    struct Branch {
        Point c, A, w, d;
        double amp = 0.0, phase = 0.0;
    };
    std::vector<Branch> br(Q);
    for (auto& b : br) {
        b.c = rng.point(n, -0.5, 0.5);
        b.A = rng.point(n * m);
        b.w = rng.point(m, -3.0, 3.0);
        b.d = rng.point(n);
        b.amp = rng.uniform(0.0, 0.3);
        b.phase = rng.uniform(0.0, 6.283185307179586);
    }
    const bool constant = rng.chance(0.1);
    const bool mirrored = Q >= 2 && rng.chance(0.5);
    const Point cut = rng.point(m);
    const double offset = rng.uniform(-0.5, 0.5);
    const std::vector<std::size_t> relabel = rng.permutation(Q);

    fill(g, [&](std::span<const double> x) {
        std::vector<Point> pts(Q, Point(n, 0.0));
        for (std::size_t i = 0; i < Q; ++i) {
            const Branch& b = br[i];
            if (constant) {
                pts[i] = br[0].c;
                continue;
            }
            if (mirrored && i == 1) {
                for (std::size_t j = 0; j < n; ++j) pts[1][j] = -pts[0][j];
                continue;
            }
            double s = b.phase;
            for (std::size_t a = 0; a < m; ++a) s += b.w[a] * x[a];
            for (std::size_t j = 0; j < n; ++j) {
                double y = b.c[j] + b.amp * std::sin(s) * b.d[j];
                for (std::size_t a = 0; a < m; ++a) y += b.A[j * m + a] * x[a];
                pts[i][j] = y;
            }
        }
        QTuple v(pts);
        return dot(x, cut) > offset ? v.reordered(relabel) : v;
    });
    return g;
}

/// Perfect matching in the bipartite graph allowed[i * q + j]; perm[i] = j.
inline bool allowed_matching(const std::vector<bool>& allowed, std::size_t q, std::vector<std::size_t>& perm)
{
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> owner(q, none);
    std::vector<bool> seen(q);
    std::function<bool(std::size_t)> grow = [&](std::size_t i) {
        for (std::size_t j = 0; j < q; ++j) {
            if (!allowed[i * q + j] || seen[j]) continue;
            seen[j] = true;
            if (owner[j] == none || grow(owner[j])) {
                owner[j] = i;
                return true;
            }
        }
        return false;
    };
    for (std::size_t i = 0; i < q; ++i) {
        std::fill(seen.begin(), seen.end(), false);
        if (!grow(i)) return false;
    }
    perm.assign(q, 0);
    for (std::size_t j = 0; j < q; ++j) perm[owner[j]] = j;
    return true;
}

/// v with point i moved by offsets[i].
inline QTuple shifted(const QTuple& v, const std::vector<Point>& offsets)
{
    std::vector<double> c(v.coords().begin(), v.coords().end());
    for (std::size_t i = 0; i < v.Q(); ++i)
        for (std::size_t j = 0; j < v.n(); ++j) c[i * v.n() + j] += offsets[i][j];
    return QTuple(v.Q(), v.n(), std::move(c));
}

/// Offsets with l2 aggregate exactly `total` (up to rounding).
inline std::vector<Point> offsets_l2(Rng& rng, std::size_t Q, std::size_t n, double total)
{
    std::vector<Point> d(Q, Point(n));
    double s = 0.0;
    for (auto& p : d)
        for (double& x : p) {
            x = rng.gaussian();
            s += x * x;
        }
    s = std::sqrt(s);
    for (auto& p : d)
        for (double& x : p) x *= total / s;
    return d;
}

} // namespace detail

using DistanceFn = std::function<double(const QTuple&, const QTuple&, MetricKind)>;

/// Ginf <= G2 <= G1 <= Q Ginf and G2 <= sqrt(Q) Ginf on random pairs. The
/// distance function is injectable so a broken metric can be shown to fail.
inline CheckReport check_metric_equivalence(const CheckConfig& cfg, const DistanceFn& dist_fn = {})
{
    cfg.validate();
    const DistanceFn d = dist_fn ? dist_fn : DistanceFn([](const QTuple& a, const QTuple& b, MetricKind k) {
        return distance(a, b, k);
    });
    const double tol = cfg.tolerance("metric_equivalence", 1e-12);
    CheckReport rep{"metric_equivalence"};
    Rng rng = detail::check_rng(cfg, rep.name);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const QTuple v = rng.tuple(Q, n, detail::degenerate_tuples());
        const bool same = rng.chance(0.1);
        QTuple w = same ? v.reordered(rng.permutation(Q))
                        : (rng.chance(0.3) ? rng.perturb(v, rng.uniform(0.0, 0.2)) : rng.tuple(Q, n));
        const double g1 = d(v, w, MetricKind::G1), g2 = d(v, w, MetricKind::G2), gi = d(v, w, MetricKind::GINF);
        const double q = static_cast<double>(Q), s = tol * (1.0 + std::max({g1, g2, gi}));
        std::string why;
        if (!(std::isfinite(g1) && std::isfinite(g2) && std::isfinite(gi) && g1 >= 0 && g2 >= 0 && gi >= 0))
            why = "non-finite or negative distance";
        else if (gi > g2 + s)
            why = "Ginf > G2";
        else if (g2 > g1 + s)
            why = "G2 > G1";
        else if (g1 > q * gi + s)
            why = "G1 > Q Ginf";
        else if (g2 > std::sqrt(q) * gi + s)
            why = "G2 > sqrt(Q) Ginf";
        else if (Q == 1 && (std::abs(g1 - g2) > s || std::abs(g1 - gi) > s))
            why = "Q = 1 distances differ";
        else if (same && std::max({g1, g2, gi}) > tol)
            why = "identical tuples at positive distance";
        rep.ratio(gi, g2);
        rep.ratio(g2, g1);
        rep.ratio(g1, q * gi);
        rep.ratio(g2, std::sqrt(q) * gi);
        if (!why.empty())
            rep.fail(detail::witness({{"v", detail::text(v)}, {"w", detail::text(w)}, {"g1", detail::text(g1)},
                                      {"g2", detail::text(g2)}, {"ginf", detail::text(gi)},
                                      {"failure", detail::quoted(why)}}));
        ++rep.trials;
    }
    return rep;
}

/// Perturbs v by at most split(v)/2 (in G2 or in Ginf, alternating), with
/// every fifth instance on the boundary G = split/2, and checks that pairing
/// each point of w with a nearest point of v is an optimal matching for all
/// three metrics.
inline CheckReport check_splitting_lemma(const CheckConfig& cfg)
{
    cfg.validate();
    const double tol = cfg.tolerance("splitting_lemma", 1e-12);
    CheckReport rep{"splitting_lemma"};
    Rng rng = detail::check_rng(cfg, rep.name);
    double worst_gap = 0.0;
    std::size_t boundary_cases = 0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const MetricKind kind = t % 2 == 0 ? MetricKind::G2 : MetricKind::GINF;
        const bool boundary = t % 5 == 0;
        const QTuple v = rng.tuple(Q, n, detail::degenerate_tuples());
        const double s = split_distance(v);

        std::vector<Point> off(Q, Point(n, 0.0));
        if (!std::isfinite(s)) {
            off = detail::offsets_l2(rng, Q, n, rng.uniform(0.0, 1.0));
        } else if (boundary) {
            // Move one point to the midpoint of a closest distinct pair.
            std::size_t a = 0, b = 0;
            for (std::size_t i = 0; i < Q; ++i)
                for (std::size_t j = 0; j < Q; ++j)
                    if (detail::distance(v.point(i), v.point(j)) == s) a = i, b = j;
            for (std::size_t k = 0; k < n; ++k) off[a][k] = 0.5 * (v.point(b)[k] - v.point(a)[k]);
            if (kind == MetricKind::GINF)
                for (std::size_t i = 0; i < Q; ++i)
                    if (i != a) off[i] = detail::offsets_l2(rng, 1, n, 0.5 * s * rng.uniform(0.0, 1.0))[0];
            ++boundary_cases;
        } else if (kind == MetricKind::G2) {
            off = detail::offsets_l2(rng, Q, n, 0.5 * s * rng.uniform(0.0, 1.0));
        } else {
            for (auto& p : off) p = detail::offsets_l2(rng, 1, n, 0.5 * s * rng.uniform(0.0, 1.0))[0];
        }
        const QTuple w = detail::shifted(v, off).reordered(rng.permutation(Q));

        const double g = distance(v, w, kind);
        std::string why;
        // Midpoints land on split/2, and tie with two points of v, only up to
        // the rounding of the coordinates themselves, which dominates for
        // clustered tuples.
        double scale = 0.0;
        for (double c : v.coords()) scale = std::max(scale, std::abs(c));
        const double slack = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale);
        if (std::isfinite(s)) {
            rep.ratio(g, 0.5 * s + slack);
            if (g > 0.5 * s * (1.0 + 1e-12) + slack) why = "constructed instance exceeds split/2";
        }

        // Nearest-support numbering: w.point(j) may pair with v.point(i) when
        // v.point(i) is a nearest point of v to it.
        std::vector<bool> allowed(Q * Q, false);
        for (std::size_t j = 0; j < Q; ++j) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < Q; ++i) best = std::min(best, detail::distance(v.point(i), w.point(j)));
            for (std::size_t i = 0; i < Q; ++i)
                allowed[i * Q + j] = detail::distance(v.point(i), w.point(j)) <= best * (1.0 + 1e-12) + slack;
        }
        std::vector<std::size_t> perm;
        if (why.empty() && !detail::allowed_matching(allowed, Q, perm)) why = "no nearest-support numbering";
        if (why.empty()) {
            for (MetricKind k : {MetricKind::G1, MetricKind::G2, MetricKind::GINF}) {
                const auto sq = detail::pair_costs(v, w, k == MetricKind::G2);
                double cost = 0.0;
                if (k == MetricKind::GINF)
                    for (std::size_t i = 0; i < Q; ++i) cost = std::max(cost, sq[i * Q + perm[i]]);
                else
                    cost = assignment::canonical_sum(sq, Q, perm);
                if (k == MetricKind::G2) cost = std::sqrt(cost);
                const double opt = distance(v, w, k);
                worst_gap = std::max(worst_gap, std::abs(cost - opt));
                if (std::abs(cost - opt) > tol * (1.0 + opt)) why = std::string("numbering not optimal for ") + to_string(k);
            }
        }
        // Support size cannot drop inside the split radius.
        if (why.empty() && distance(v, w, MetricKind::GINF) < 0.5 * s &&
            support_sigma(w).sigma() < support_sigma(v).sigma())
            why = "support shrank within split/2";
        if (!why.empty())
            rep.fail(detail::witness({{"v", detail::text(v)}, {"w", detail::text(w)}, {"metric", detail::quoted(to_string(kind))},
                                      {"split", detail::text(s)}, {"failure", detail::quoted(why)}}));
        ++rep.trials;
    }
    rep.measured["max_cost_gap"] = worst_gap;
    rep.measured["boundary_cases"] = static_cast<double>(boundary_cases);
    return rep;
}

/// For the frame's (n, Q): (A) |xi(v) - xi(w)| <= G2(v, w) with a positive
/// empirical lower ratio alpha, (B) equality for G2(v, w) below
/// xi_isometry_radius(v), (C) |xi(v)| = G2(v, Q[[0]]).
inline CheckReport check_xi(const CheckConfig& cfg, const DirectionFrame& frame)
{
    cfg.validate();
    frame.validate();
    const double tol = cfg.tolerance("xi", 1e-9), tol_norm = cfg.tolerance("xi_norm", 1e-12);
    CheckReport rep{"xi"};
    Rng rng = detail::check_rng(cfg, rep.name + std::to_string(frame.n) + "_" + std::to_string(frame.Q));
    const std::size_t Q = frame.Q, n = frame.n;
    const QTuple zero = QTuple::zero(Q, n);
    double alpha = std::numeric_limits<double>::infinity(), worst_iso = 0.0, worst_norm = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const QTuple v = rng.tuple(Q, n, detail::degenerate_tuples());
        const EmbeddedVector xv = xi(v, frame);
        std::string why;

        const double nv = xv.norm(), g0 = distance(v, zero, MetricKind::G2);
        worst_norm = std::max(worst_norm, std::abs(nv - g0));
        if (std::abs(nv - g0) > tol_norm) why = "norm identity";

        const QTuple w = rng.chance(0.5) ? rng.tuple(Q, n) : rng.perturb(v, rng.uniform(0.0, 0.3));
        const double e = detail::distance(xv.coords, xi(w, frame).coords), g = distance(v, w, MetricKind::G2);
        rep.ratio(e, g);
        if (g > 1e-9) alpha = std::min(alpha, e / g);
        if (e > g + tol) why = "upper bound";

        const double r = xi_isometry_radius(v, frame);
        const double radius = std::isfinite(r) ? r : 1.0;
        const QTuple u = detail::shifted(v, detail::offsets_l2(rng, Q, n, 0.99 * radius * rng.uniform(0.0, 1.0)));
        const double eu = detail::distance(xv.coords, xi(u, frame).coords), gu = distance(v, u, MetricKind::G2);
        worst_iso = std::max(worst_iso, std::abs(eu - gu));
        if (std::abs(eu - gu) > tol) why = "local isometry";

        if (!why.empty())
            rep.fail(detail::witness({{"v", detail::text(v)}, {"w", detail::text(w)}, {"near", detail::text(u)},
                                      {"failure", detail::quoted(why)}}));
        if (!(alpha > 0.0)) {
            if (why.empty()) rep.fail(detail::witness({{"v", detail::text(v)}, {"w", detail::text(w)},
                                                       {"failure", detail::quoted("xi collision")}}));
            alpha = 0.0;
        }
        ++rep.trials;
    }
    rep.measured["alpha"] = std::isfinite(alpha) ? alpha : 1.0;
    rep.measured["max_isometry_error"] = worst_iso;
    rep.measured["max_norm_error"] = worst_norm;
    rep.measured["K"] = static_cast<double>(frame.K());
    return rep;
}

/// On random Lipschitz grid functions: at every node the embedded difference
/// quotient max_b |xi(f(a)) - xi(f(b))| / h is at most sqrt(Q) times the local
/// Lipschitz quotient max_b Ginf(f(a), f(b)) / h, and equals G2 / h on edges
/// inside the isometry radius.
inline CheckReport check_sqrt_Q_bound(const CheckConfig& cfg)
{
    cfg.validate();
    const double tol = cfg.tolerance("sqrt_Q_bound", 1e-6);
    CheckReport rep{"sqrt_Q_bound"};
    Rng rng = detail::check_rng(cfg, rep.name);
    std::map<std::pair<std::size_t, std::size_t>, DirectionFrame> frames;
    double worst_quotient = 0.0;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const std::size_t m = detail::pick(rng, cfg.m_range);
        auto it = frames.find({n, Q});
        if (it == frames.end()) {
            FrameOptions fo;
            fo.seed = cfg.seed;
            it = frames.emplace(std::pair{n, Q}, build_frame(n, Q, 0, fo)).first;
        }
        const DirectionFrame& frame = it->second;
        const GridFunction f = detail::random_lipschitz_grid(rng, m, Q, n);

        std::vector<EmbeddedVector> z(f.node_count());
        for (std::size_t k = 0; k < f.node_count(); ++k) z[k] = xi(f.values[k], frame);
        std::vector<double> emb(f.node_count(), 0.0), lip(f.node_count(), 0.0);
        std::string why;
        for (const Edge& e : f.edges()) {
            const double de = detail::distance(z[e.a].coords, z[e.b].coords) / f.h;
            const double gi = distance(f.values[e.a], f.values[e.b], MetricKind::GINF) / f.h;
            for (std::size_t k : {e.a, e.b}) {
                emb[k] = std::max(emb[k], de);
                lip[k] = std::max(lip[k], gi);
            }
            const double g2 = distance(f.values[e.a], f.values[e.b], MetricKind::G2);
            if (g2 < xi_isometry_radius(f.values[e.a], frame) && std::abs(de * f.h - g2) > tol)
                why = "isometry on edge " + std::to_string(e.a) + "-" + std::to_string(e.b);
        }
        const double root = std::sqrt(static_cast<double>(Q));
        for (std::size_t k = 0; k < f.node_count(); ++k) {
            rep.ratio(emb[k], root * lip[k]);
            if (lip[k] > 0.0) worst_quotient = std::max(worst_quotient, emb[k] / lip[k]);
            if (emb[k] > root * lip[k] + tol && why.empty()) why = "sqrt(Q) bound at node " + std::to_string(k);
        }
        if (!why.empty())
            rep.fail(detail::witness({{"Q", std::to_string(Q)}, {"n", std::to_string(n)}, {"m", std::to_string(m)},
                                      {"failure", detail::quoted(why)}}));
        ++rep.trials;
    }
    rep.measured["max_quotient_over_lip"] = worst_quotient;
    return rep;
}

/// On random sub-boxes V of random grid functions:
///   min_{y in V} sum_{x in V} G2(f(x), f(y))^q h^m <= m^((q-1)/2) diam(V)^q E_q(V),
/// with E_q(V) the discrete q-energy of the edges inside V. The constant
/// follows from joining points by monotone lattice paths; the empirical
/// constant LHS / (diam^q E_q) is reported.
inline CheckReport check_poincare(const CheckConfig& cfg)
{
    cfg.validate();
    const double tol = cfg.tolerance("poincare", 1e-9);
    CheckReport rep{"poincare"};
    Rng rng = detail::check_rng(cfg, rep.name);
    double worst_c = 0.0;
    const double exponents[] = {1.5, 2.0, 3.0};
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const std::size_t m = detail::pick(rng, cfg.m_range);
        const double q = exponents[t % 3];
        GridFunction f = detail::random_lipschitz_grid(rng, m, Q, n);
        if (rng.chance(0.2)) randomize(f, rng, detail::degenerate_tuples());

        std::vector<std::size_t> lo(m), hi(m);
        bool has_edge = false;
        for (std::size_t a = 0; a < m; ++a) {
            lo[a] = rng.index(f.shape[a]);
            hi[a] = lo[a] + rng.index(f.shape[a] - lo[a]);
            has_edge = has_edge || hi[a] > lo[a];
        }
        if (!has_edge) {
            if (lo[0] > 0) --lo[0];
            else ++hi[0];
        }
        auto inside = [&](std::size_t k) {
            const auto idx = f.multi_index(k);
            for (std::size_t a = 0; a < m; ++a)
                if (idx[a] < lo[a] || idx[a] > hi[a]) return false;
            return true;
        };
        std::vector<std::size_t> V;
        for (std::size_t k = 0; k < f.node_count(); ++k)
            if (inside(k)) V.push_back(k);

        const double vol = std::pow(f.h, static_cast<double>(m));
        double energy = 0.0;
        for (const Edge& e : f.edges())
            if (inside(e.a) && inside(e.b))
                energy += vol * std::pow(distance(f.values[e.a], f.values[e.b], MetricKind::G2) / f.h, q);

        std::vector<double> g(V.size() * V.size(), 0.0);
        for (std::size_t i = 0; i < V.size(); ++i)
            for (std::size_t j = i + 1; j < V.size(); ++j)
                g[i * V.size() + j] = g[j * V.size() + i] =
                    distance(f.values[V[i]], f.values[V[j]], MetricKind::G2);
        double lhs = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < V.size(); ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < V.size(); ++i) s += std::pow(g[i * V.size() + j], q) * vol;
            lhs = std::min(lhs, s);
        }

        double diam2 = 0.0;
        for (std::size_t a = 0; a < m; ++a) diam2 += std::pow(f.h * static_cast<double>(hi[a] - lo[a]), 2);
        const double scale = std::pow(std::sqrt(diam2), q) * energy;
        const double bound = std::pow(static_cast<double>(m), (q - 1.0) / 2.0) * scale;
        rep.ratio(lhs, bound);
        if (scale > 0.0) worst_c = std::max(worst_c, lhs / scale);
        if (lhs > bound + tol * (1.0 + bound))
            rep.fail(detail::witness({{"m", std::to_string(m)}, {"Q", std::to_string(Q)}, {"q", detail::text(q)},
                                      {"lhs", detail::text(lhs)}, {"bound", detail::text(bound)},
                                      {"failure", detail::quoted("Poincare inequality")}}));
        ++rep.trials;
    }
    rep.measured["C"] = worst_c;
    return rep;
}

/// Dictionary lower bound on the dual norm of zeta(v) - zeta(w) against
/// G1(v, w): lower <= G1 always, equality for Q = 1, zero for identical
/// tuples, and a positive ratio otherwise. The smallest ratio per Q is
/// reported.
inline CheckReport check_zeta_bounds(const CheckConfig& cfg, std::size_t dictionary_size = 256)
{
    cfg.validate();
    const double tol = cfg.tolerance("zeta_bounds", 1e-12);
    CheckReport rep{"zeta_bounds"};
    Rng rng = detail::check_rng(cfg, rep.name);
    std::map<std::size_t, double> min_ratio;
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const QTuple v = rng.tuple(Q, n, detail::degenerate_tuples());
        const bool same = rng.chance(0.1);
        const QTuple w = same ? v.reordered(rng.permutation(Q))
                              : (rng.chance(0.3) ? rng.perturb(v, rng.uniform(0.0, 0.2)) : rng.tuple(Q, n));
        const Point base = rng.point(n);
        const ZetaGap z = zeta_dual_gap(v, w, dictionary_size, base, cfg.seed + t);
        std::string why;
        if (!(z.lower >= 0.0) || z.lower > z.upper * (1.0 + tol)) why = "lower bound exceeds G1";
        if (Q == 1 && std::abs(z.lower - z.upper) > tol * z.upper) why = "Q = 1 gap differs from G1";
        if (same && (z.lower != 0.0 || z.upper != 0.0)) why = "identical tuples";
        if (z.upper > 0.0) {
            rep.ratio(z.lower, z.upper);
            const double r = z.lower / z.upper;
            auto [it, fresh] = min_ratio.emplace(Q, r);
            if (!fresh) it->second = std::min(it->second, r);
            if (!(r > 0.0)) why = "zero lower bound for distinct tuples";
        }
        if (!why.empty())
            rep.fail(detail::witness({{"v", detail::text(v)}, {"w", detail::text(w)}, {"lower", detail::text(z.lower)},
                                      {"upper", detail::text(z.upper)}, {"failure", detail::quoted(why)}}));
        ++rep.trials;
    }
    double overall = 1.0;
    for (const auto& [Q, r] : min_ratio) {
        rep.measured["min_ratio_Q" + std::to_string(Q)] = r;
        overall = std::min(overall, r);
    }
    rep.measured["min_ratio"] = overall;
    return rep;
}

/// Per-edge energy contributions after keeping n1 <= n2 coordinates never
/// exceed those after keeping n2, nor those of f itself. No tolerance.
inline CheckReport check_truncation_monotonicity(const CheckConfig& cfg)
{
    cfg.validate();
    CheckReport rep{"truncation_monotonicity"};
    Rng rng = detail::check_rng(cfg, rep.name);
    const double exponents[] = {1.5, 2.0, 3.0};
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const std::size_t m = detail::pick(rng, cfg.m_range);
        const double p = exponents[t % 3];
        GridFunction f = detail::random_lipschitz_grid(rng, m, Q, n);
        if (rng.chance(0.5)) randomize(f, rng, detail::degenerate_tuples());
        std::size_t n1 = 1 + rng.index(n), n2 = 1 + rng.index(n);
        if (n1 > n2) std::swap(n1, n2);
        const EnergyReport e1 = discrete_energy(truncate_coords(f, n1), p);
        const EnergyReport e2 = discrete_energy(truncate_coords(f, n2), p);
        const EnergyReport ef = discrete_energy(f, p);
        std::size_t bad = e1.per_edge.size();
        for (std::size_t k = 0; k < e1.per_edge.size(); ++k) {
            const double a = e1.per_edge[k].contribution, b = e2.per_edge[k].contribution,
                         c = ef.per_edge[k].contribution;
            rep.ratio(a, b);
            rep.ratio(b, c);
            if ((a > b || b > c) && bad == e1.per_edge.size()) bad = k;
        }
        if (bad < e1.per_edge.size()) {
            const Edge& e = e1.per_edge[bad].edge;
            rep.fail(detail::witness({{"a", detail::text(f.values[e.a])}, {"b", detail::text(f.values[e.b])},
                                      {"n1", std::to_string(n1)}, {"n2", std::to_string(n2)}, {"p", detail::text(p)},
                                      {"failure", detail::quoted("energy increased under truncation")}}));
        }
        ++rep.trials;
    }
    return rep;
}

/// Cone extension of random spherical samples (including far-apart groups
/// that force splitting): for a random probe tuple v,
///   max over queries Ginf(f^(x), v) <= (6Q + 2) max over samples Ginf(f(x_s), v).
inline CheckReport check_cone_sup_bound(const CheckConfig& cfg)
{
    cfg.validate();
    const double tol = cfg.tolerance("cone_sup_bound", 1e-9);
    CheckReport rep{"cone_sup_bound"};
    Rng rng = detail::check_rng(cfg, rep.name);
    for (std::size_t t = 0; t < cfg.trials; ++t) {
        const std::size_t Q = detail::pick(rng, cfg.Q_range), n = detail::pick(rng, cfg.n_range);
        const std::size_t m = detail::pick(rng, cfg.m_range);
        const double R = rng.uniform(0.5, 2.0);
        BoundarySample bs;
        bs.m = m;
        bs.R = R;
        const std::size_t count = m == 1 ? 2 : 24;
        const QTuple base = rng.tuple(Q, n);
        const bool far = rng.chance(0.5);
        for (std::size_t k = 0; k < count; ++k) {
            Point x = m == 1 ? Point{k == 0 ? -R : R} : rng.unit_vector(m);
            if (m > 1)
                for (double& c : x) c *= R;
            QTuple v = rng.perturb(base, 0.05);
            if (far && Q >= 2) {
                std::vector<double> c(v.coords().begin(), v.coords().end());
                for (std::size_t j = 0; j < n; ++j) c[j] += 20.0;
                v = QTuple(Q, n, std::move(c));
            }
            bs.points.push_back({std::move(x), std::move(v)});
        }
        const ConeExtension ext(bs);
        const QTuple probe = rng.tuple(Q, n);
        double data = 0.0;
        for (const auto& p : bs.points) data = std::max(data, distance(p.v, probe, MetricKind::GINF));
        double ext_max = 0.0;
        for (std::size_t k = 0; k < 100; ++k) {
            Point x = rng.unit_vector(m);
            const double r = R * rng.uniform(0.0, 1.0);
            for (double& c : x) c *= r;
            ext_max = std::max(ext_max, distance(ext(x), probe, MetricKind::GINF));
        }
        const double bound = (6.0 * static_cast<double>(Q) + 2.0) * data;
        rep.ratio(ext_max, bound);
        if (ext_max > bound + tol * (1.0 + bound))
            rep.fail(detail::witness({{"Q", std::to_string(Q)}, {"m", std::to_string(m)},
                                      {"ext_max", detail::text(ext_max)}, {"bound", detail::text(bound)},
                                      {"failure", detail::quoted("sup bound")}}));
        ++rep.trials;
    }
    return rep;
}

/// Every check; the embedding check runs once per (n, Q) in the ranges.
inline std::vector<CheckReport> run_all(const CheckConfig& cfg)
{
    cfg.validate();
    std::vector<CheckReport> out;
    out.push_back(check_metric_equivalence(cfg));
    out.push_back(check_splitting_lemma(cfg));
    for (std::size_t n = cfg.n_range.first; n <= cfg.n_range.second; ++n)
        for (std::size_t Q = cfg.Q_range.first; Q <= cfg.Q_range.second; ++Q) {
            FrameOptions fo;
            fo.seed = cfg.seed;
            CheckReport r = check_xi(cfg, build_frame(n, Q, 0, fo));
            r.name += "_n" + std::to_string(n) + "_Q" + std::to_string(Q);
            out.push_back(std::move(r));
        }
    out.push_back(check_sqrt_Q_bound(cfg));
    out.push_back(check_poincare(cfg));
    out.push_back(check_zeta_bounds(cfg));
    out.push_back(check_truncation_monotonicity(cfg));
    out.push_back(check_cone_sup_bound(cfg));
    return out;
}

} // namespace qv
