#pragma once

// Almgren's sorted-projection embedding of Q_Q(R^n) into R^N and an
// approximate inverse.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "qv/qspace.hpp"
#include "qv/qtuple.hpp"

namespace qv {

using Basis = std::vector<Point>; ///< n rows, each a unit vector

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
    return s;
}

inline void require_unit(std::span<const double> e, const char* op)
{
    if (std::abs(norm(e) - 1.0) > 1e-10) throw InvalidInput(std::string(op) + ": direction is not a unit vector");
}

inline void require_orthonormal(const Basis& basis, std::size_t n, const char* op)
{
    if (basis.size() != n) throw InvalidInput(std::string(op) + ": basis must have n vectors");
    for (std::size_t a = 0; a < n; ++a) {
        if (basis[a].size() != n) throw InvalidInput(std::string(op) + ": basis vector has wrong length");
        for (std::size_t b = a; b < n; ++b) {
            const double g = dot(basis[a], basis[b]);
            if (std::abs(g - (a == b ? 1.0 : 0.0)) > 1e-10)
                throw InvalidInput(std::string(op) + ": basis is not orthonormal");
        }
    }
}

/// Order of the points by projection onto e; equal projections fall back to
/// lexicographic order of the points themselves.
inline std::vector<std::size_t> projection_order(const QTuple& v, std::span<const double> e,
                                                 std::vector<double>& proj)
{
    proj.resize(v.Q());
    for (std::size_t i = 0; i < v.Q(); ++i) proj[i] = dot(v.point(i), e);
    std::vector<std::size_t> idx(v.Q());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        if (proj[a] != proj[b]) return proj[a] < proj[b];
        auto pa = v.point(a), pb = v.point(b);
        if (std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end())) return true;
        if (std::lexicographical_compare(pb.begin(), pb.end(), pa.begin(), pa.end())) return false;
        return a < b;
    });
    return idx;
}

} // namespace detail

/// Inner products <y_i, e> in increasing order.
inline std::vector<double> pi_e(const QTuple& v, std::span<const double> e)
{
    if (e.size() != v.n()) throw InvalidInput("pi_e: direction has wrong dimension");
    detail::require_unit(e, "pi_e");
    std::vector<double> proj;
    auto order = detail::projection_order(v, e, proj);
    std::vector<double> out(v.Q());
    for (std::size_t i = 0; i < v.Q(); ++i) out[i] = proj[order[i]];
    return out;
}

/// Concatenated sorted projections onto the vectors of one orthonormal basis.
inline std::vector<double> xi0(const QTuple& v, const Basis& basis)
{
    detail::require_orthonormal(basis, v.n(), "xi0");
    std::vector<double> out;
    out.reserve(v.Q() * v.n());
    for (const auto& e : basis) {
        auto p = pi_e(v, e);
        out.insert(out.end(), p.begin(), p.end());
    }
    return out;
}

/// K orthonormal bases whose first vectors e_k separate any Q^2 directions:
/// for every family v_1..v_L there is a k with |<e_k, v_l>| >= epsilon |v_l|
/// (certified empirically at construction).
struct DirectionFrame {
    std::size_t n = 0;
    std::size_t Q = 0;
    double epsilon = 0.0;
    std::vector<Basis> bases;

    std::size_t K() const noexcept { return bases.size(); }
    std::size_t embedded_dim() const noexcept { return Q * n * bases.size(); }

    void validate() const
    {
        detail::require(n >= 1 && Q >= 1, "frame: n and Q must be positive");
        detail::require(!bases.empty(), "frame: needs at least one basis");
        for (const auto& b : bases) detail::require_orthonormal(b, n, "frame");
    }
};

struct FrameOptions {
    std::uint64_t seed = 0x5eed5eedULL;
    std::size_t validation_draws = 500;
    /// Minimum certified epsilon; 0 selects 1 / (4 Q^2).
    double min_epsilon = 0.0;
    std::size_t max_directions = 1024;
    std::size_t candidates = 4000;
};

namespace detail {

inline Point random_unit(std::mt19937_64& rng, std::size_t n)
{
    std::normal_distribution<double> gauss(0.0, 1.0);
    Point p(n);
    double s = 0.0;
    do {
        for (double& x : p) x = gauss(rng);
        s = norm(p);
    } while (s < 1e-12);
    for (double& x : p) x /= s;
    return p;
}

// Greedy max-min packing of K axes (directions modulo sign).
inline std::vector<Point> pack_directions(std::size_t n, std::size_t K, std::mt19937_64& rng, std::size_t candidates)
{
    std::vector<Point> cand;
    cand.reserve(std::max(candidates, 8 * K));
    for (std::size_t c = 0; c < std::max(candidates, 8 * K); ++c) cand.push_back(random_unit(rng, n));
    std::vector<Point> chosen{cand.front()};
    std::vector<double> gap(cand.size(), std::numeric_limits<double>::infinity());
    while (chosen.size() < K) {
        const Point& last = chosen.back();
        std::size_t best = 0;
        double best_gap = -1.0;
        for (std::size_t c = 0; c < cand.size(); ++c) {
            // Distance to the axis through `last`: min over the antipodal pair.
            const double d = std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(dot(cand[c], last))));
            gap[c] = std::min(gap[c], d);
            if (gap[c] > best_gap) {
                best_gap = gap[c];
                best = c;
            }
        }
        chosen.push_back(cand[best]);
    }
    return chosen;
}

inline Basis complete_basis(const Point& e, std::mt19937_64& rng)
{
    const std::size_t n = e.size();
    Basis b{e};
    while (b.size() < n) {
        Point r = random_unit(rng, n);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : b) {
                const double c = dot(r, q);
                for (std::size_t j = 0; j < n; ++j) r[j] -= c * q[j];
            }
        const double s = norm(r);
        if (s < 1e-6) continue;
        for (double& x : r) x /= s;
        b.push_back(std::move(r));
    }
    return b;
}

// Smallest, over random draws of L unit vectors, of the best separation
// max_k min_l |<e_k, v_l>|.
inline double empirical_epsilon(const std::vector<Point>& dirs, std::size_t n, std::size_t L, std::size_t draws,
                                std::mt19937_64& rng)
{
    double eps = std::numeric_limits<double>::infinity();
    std::vector<Point> vs(L);
    for (std::size_t d = 0; d < draws; ++d) {
        for (auto& v : vs) v = random_unit(rng, n);
        double best = 0.0;
        for (const auto& e : dirs) {
            double worst = std::numeric_limits<double>::infinity();
            for (const auto& v : vs) worst = std::min(worst, std::abs(dot(e, v)));
            best = std::max(best, worst);
        }
        eps = std::min(eps, best);
    }
    return eps;
}

inline DirectionFrame frame_with(std::size_t n, std::size_t Q, std::size_t K, const FrameOptions& opt, double& eps)
{
    std::mt19937_64 rng(opt.seed ^ (0x9e3779b97f4a7c15ULL * (K + 1)));
    auto dirs = pack_directions(n, K, rng, opt.candidates);
    eps = empirical_epsilon(dirs, n, Q * Q, opt.validation_draws, rng);
    DirectionFrame f;
    f.n = n;
    f.Q = Q;
    f.epsilon = eps;
    for (const auto& e : dirs) f.bases.push_back(complete_basis(e, rng));
    return f;
}

} // namespace detail

/// Builds a frame for Q-tuples in R^n. K == 0 selects K automatically by
/// doubling from 2n until the empirical separation test passes.
inline DirectionFrame build_frame(std::size_t n, std::size_t Q, std::size_t K = 0, const FrameOptions& opt = {})
{
    detail::require(n >= 1 && Q >= 1, "build_frame: n and Q must be positive");
    if (n == 1) {
        DirectionFrame f;
        f.n = 1;
        f.Q = Q;
        f.epsilon = 1.0;
        f.bases = {Basis{Point{1.0}}};
        return f;
    }
    const double min_eps = opt.min_epsilon > 0.0 ? opt.min_epsilon : 1.0 / (4.0 * static_cast<double>(Q * Q));
    if (K != 0) {
        double eps = 0.0;
        auto f = detail::frame_with(n, Q, K, opt, eps);
        if (!(eps >= min_eps))
            throw FrameError("build_frame: K = " + std::to_string(K) + " certifies epsilon = " + std::to_string(eps) +
                             " below the required " + std::to_string(min_eps));
        return f;
    }
    for (std::size_t k = 2 * n; k <= opt.max_directions; k *= 2) {
        double eps = 0.0;
        auto f = detail::frame_with(n, Q, k, opt, eps);
        if (eps >= min_eps) return f;
    }
    throw FrameError("build_frame: separation test still failing at K > " + std::to_string(opt.max_directions));
}

/// Coordinates of xi(v) in R^{Q n K}: block k holds xi0 under basis k, the
/// whole vector scaled by K^{-1/2}.
struct EmbeddedVector {
    std::vector<double> coords;

    double norm() const { return detail::norm(coords); }
    friend double distance(const EmbeddedVector& a, const EmbeddedVector& b)
    {
        return detail::distance(a.coords, b.coords);
    }
};

namespace detail {

inline void require_frame_match(const QTuple& v, const DirectionFrame& frame, const char* op)
{
    if (v.n() != frame.n || v.Q() != frame.Q)
        throw InvalidInput(std::string(op) + ": tuple is " + std::to_string(v.Q()) + "x" + std::to_string(v.n()) +
                           " but frame is for Q=" + std::to_string(frame.Q) + ", n=" + std::to_string(frame.n));
}

inline void xi_into(const QTuple& v, const DirectionFrame& frame, std::vector<double>& out)
{
    const double scale = 1.0 / std::sqrt(static_cast<double>(frame.K()));
    out.resize(frame.embedded_dim());
    std::vector<double> proj;
    std::size_t pos = 0;
    for (const auto& basis : frame.bases)
        for (const auto& e : basis) {
            auto order = projection_order(v, e, proj);
            for (std::size_t i : order) out[pos++] = proj[i] * scale;
        }
}

} // namespace detail

inline EmbeddedVector xi(const QTuple& v, const DirectionFrame& frame)
{
    detail::require_frame_match(v, frame, "xi");
    EmbeddedVector z;
    detail::xi_into(v, frame, z.coords);
    return z;
}

/// Radius below which xi is an isometry around v: half the smallest
/// splitting distance of the projected 1-D tuples over all frame directions.
inline double xi_isometry_radius(const QTuple& v, const DirectionFrame& frame)
{
    detail::require_frame_match(v, frame, "xi_isometry_radius");
    double r = std::numeric_limits<double>::infinity();
    for (const auto& basis : frame.bases)
        for (const auto& e : basis) {
            std::vector<double> p(v.Q());
            for (std::size_t i = 0; i < v.Q(); ++i) p[i] = detail::dot(v.point(i), e);
            r = std::min(r, split_distance(QTuple(v.Q(), 1, std::move(p))));
        }
    return r / 2.0;
}

class DecodeError : public Error {
public:
    DecodeError(const std::string& what, QTuple best, double residual)
        : Error(what), best_(std::move(best)), residual_(residual)
    {
    }
    const QTuple& best() const noexcept { return best_; }
    double residual() const noexcept { return residual_; }

private:
    QTuple best_;
    double residual_;
};

struct DecodeOptions {
    std::size_t max_evaluations = 400000;
    /// Refinement stops once the residual falls below tolerance * (1 + |z|)
    /// or the pattern step below step_tolerance * (1 + |z|).
    double tolerance = 1e-14;
    double step_tolerance = 1e-13;
    /// Number of bases used to assemble starting tuples.
    std::size_t seed_bases = 4;
    /// Number of bases used to score candidate points while assembling.
    std::size_t scoring_bases = 32;
};

namespace detail {

// Starting tuple from basis k: every choice of one sorted entry per basis
// vector gives a candidate point; candidates are scored by how well their
// projections appear in the other bases' sorted lists, then picked greedily
// so that each sorted entry is used exactly once.
inline QTuple assemble_from_basis(const std::vector<double>& z, const DirectionFrame& frame, std::size_t k,
                                  std::size_t scoring_bases)
{
    const std::size_t Q = frame.Q, n = frame.n, K = frame.K();
    const double unscale = std::sqrt(static_cast<double>(K));
    auto entry = [&](std::size_t kk, std::size_t j, std::size_t i) { return z[(kk * n + j) * Q + i] * unscale; };

    std::size_t combos = 1;
    for (std::size_t j = 0; j < n; ++j) combos *= Q;

    struct Candidate {
        double score;
        std::size_t code;
    };
    std::vector<Candidate> cands(combos);
    std::vector<std::size_t> digits(n);
    Point p(n);
    std::vector<std::size_t> others;
    for (std::size_t kk = 0; kk < K && others.size() < scoring_bases; ++kk)
        if (kk != k) others.push_back(kk);

    for (std::size_t code = 0; code < combos; ++code) {
        std::size_t c = code;
        for (std::size_t j = 0; j < n; ++j) {
            digits[j] = c % Q;
            c /= Q;
        }
        std::fill(p.begin(), p.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            const double s = entry(k, j, digits[j]);
            const auto& e = frame.bases[k][j];
            for (std::size_t t = 0; t < n; ++t) p[t] += s * e[t];
        }
        double score = 0.0;
        for (std::size_t kk : others)
            for (std::size_t j = 0; j < n; ++j) {
                const double proj = dot(p, frame.bases[kk][j]);
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < Q; ++i) best = std::min(best, std::abs(proj - entry(kk, j, i)));
                score += best * best;
            }
        cands[code] = {score, code};
    }
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.score < b.score; });

    std::vector<std::vector<bool>> used(n, std::vector<bool>(Q, false));
    std::vector<double> coords;
    coords.reserve(Q * n);
    std::size_t picked = 0;
    for (const auto& cand : cands) {
        if (picked == Q) break;
        std::size_t c = cand.code;
        bool ok = true;
        for (std::size_t j = 0; j < n; ++j) {
            digits[j] = c % Q;
            c /= Q;
            if (used[j][digits[j]]) ok = false;
        }
        if (!ok) continue;
        std::fill(p.begin(), p.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            used[j][digits[j]] = true;
            const double s = entry(k, j, digits[j]);
            for (std::size_t t = 0; t < n; ++t) p[t] += s * frame.bases[k][j][t];
        }
        coords.insert(coords.end(), p.begin(), p.end());
        ++picked;
    }
    return QTuple(Q, n, std::move(coords));
}

} // namespace detail

/// Approximate inverse of xi: a tuple locally minimising |xi(v) - z|,
/// found by compass search from the hint or from an assembled starting
/// tuple. Exact images are recovered to round-off. Throws DecodeError
/// (carrying the best iterate) when the evaluation budget runs out.
inline QTuple decode(const EmbeddedVector& z, const DirectionFrame& frame, const std::optional<QTuple>& hint = {},
                     const DecodeOptions& opt = {})
{
    frame.validate();
    if (z.coords.size() != frame.embedded_dim())
        throw InvalidInput("decode: embedded vector has length " + std::to_string(z.coords.size()) + ", expected " +
                           std::to_string(frame.embedded_dim()));
    const std::size_t Q = frame.Q, n = frame.n;

    std::vector<double> buf;
    std::size_t evaluations = 0;
    auto residual = [&](const std::vector<double>& coords) {
        ++evaluations;
        detail::xi_into(QTuple(Q, n, coords), frame, buf);
        return detail::distance(buf, z.coords);
    };

    std::vector<QTuple> starts;
    if (hint) {
        detail::require_frame_match(*hint, frame, "decode");
        starts.push_back(*hint);
    }
    for (std::size_t k = 0; k < std::min(opt.seed_bases, frame.K()); ++k)
        starts.push_back(detail::assemble_from_basis(z.coords, frame, k, opt.scoring_bases));

    const double scale = 1.0 + z.norm();
    std::vector<double> x;
    double fx = std::numeric_limits<double>::infinity();
    for (const auto& s : starts) {
        std::vector<double> c(s.coords().begin(), s.coords().end());
        const double r = residual(c);
        if (r < fx) {
            fx = r;
            x = std::move(c);
        }
        if (fx <= opt.tolerance * scale) break;
    }

    double step = std::max(fx, 1e-6 * scale);
    while (fx > opt.tolerance * scale && step > opt.step_tolerance * scale) {
        bool improved = false;
        for (std::size_t c = 0; c < x.size(); ++c) {
            for (double sign : {1.0, -1.0}) {
                const double old = x[c];
                x[c] = old + sign * step;
                const double r = residual(x);
                if (r < fx) {
                    fx = r;
                    improved = true;
                    break;
                }
                x[c] = old;
            }
        }
        if (!improved) step *= 0.5;
        if (evaluations > opt.max_evaluations)
            throw DecodeError("decode: evaluation budget exhausted with residual " + std::to_string(fx),
                              QTuple(Q, n, x), fx);
    }
    return QTuple(Q, n, std::move(x)).canonical();
}

} // namespace qv
