#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qv/error.hpp"

namespace qv {

using Point = std::vector<double>;

/// An unordered Q-tuple of points in R^n, i.e. an element of Q_Q(R^n).
///
/// Points are stored in a flat row-major buffer. The stored order is a
/// numbering of the tuple and carries no meaning of its own: operator==
/// compares multisets. Use identical() for order-sensitive comparison.
class QTuple {
public:
    QTuple() = default;

    QTuple(std::size_t q, std::size_t n, std::vector<double> coords)
        : q_(q), n_(n), coords_(std::move(coords))
    {
        detail::require(q_ >= 1, "QTuple: Q must be positive");
        detail::require(n_ >= 1, "QTuple: n must be positive");
        detail::require(coords_.size() == q_ * n_, "QTuple: expected Q*n coordinates, got " +
                                                       std::to_string(coords_.size()));
        for (double c : coords_)
            detail::require(std::isfinite(c), "QTuple: coordinates must be finite");
    }

    explicit QTuple(const std::vector<Point>& points)
    {
        detail::require(!points.empty(), "QTuple: Q must be positive");
        q_ = points.size();
        n_ = points.front().size();
        detail::require(n_ >= 1, "QTuple: n must be positive");
        coords_.reserve(q_ * n_);
        for (const auto& p : points) {
            detail::require(p.size() == n_, "QTuple: all points must have n coordinates");
            for (double c : p) {
                detail::require(std::isfinite(c), "QTuple: coordinates must be finite");
                coords_.push_back(c);
            }
        }
    }

    /// Q copies of the origin, written Q[[0]].
    static QTuple zero(std::size_t q, std::size_t n) { return QTuple(q, n, std::vector<double>(q * n, 0.0)); }

    /// Q copies of a single point.
    static QTuple repeated(std::size_t q, std::span<const double> y)
    {
        std::vector<double> c;
        c.reserve(q * y.size());
        for (std::size_t i = 0; i < q; ++i) c.insert(c.end(), y.begin(), y.end());
        return QTuple(q, y.size(), std::move(c));
    }

    std::size_t Q() const noexcept { return q_; }
    std::size_t n() const noexcept { return n_; }
    bool empty() const noexcept { return q_ == 0; }

    std::span<const double> point(std::size_t i) const { return {coords_.data() + i * n_, n_}; }
    std::span<const double> coords() const noexcept { return coords_; }

    std::vector<Point> points() const
    {
        std::vector<Point> out;
        out.reserve(q_);
        for (std::size_t i = 0; i < q_; ++i) out.emplace_back(point(i).begin(), point(i).end());
        return out;
    }

    /// Same multiset with points in the given numbering: result.point(k) == point(order[k]).
    QTuple reordered(std::span<const std::size_t> order) const
    {
        detail::require(order.size() == q_, "QTuple::reordered: order must have Q entries");
        std::vector<double> c;
        c.reserve(coords_.size());
        for (std::size_t k : order) {
            auto p = point(k);
            c.insert(c.end(), p.begin(), p.end());
        }
        return QTuple(q_, n_, std::move(c));
    }

    /// Indices sorting the points lexicographically (stable).
    std::vector<std::size_t> canonical_order() const
    {
        std::vector<std::size_t> idx(q_);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(), [this](std::size_t a, std::size_t b) {
            auto pa = point(a), pb = point(b);
            return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
        });
        return idx;
    }

    /// Lexicographically sorted numbering; equal multisets have identical canonical forms.
    QTuple canonical() const { return reordered(canonical_order()); }

    QTuple scaled(double t) const
    {
        std::vector<double> c = coords_;
        for (double& x : c) x *= t;
        return QTuple(q_, n_, std::move(c));
    }

    /// Order-sensitive equality of the stored numbering.
    bool identical(const QTuple& other) const
    {
        return q_ == other.q_ && n_ == other.n_ && coords_ == other.coords_;
    }

    /// Multiset equality.
    friend bool operator==(const QTuple& a, const QTuple& b)
    {
        if (a.q_ != b.q_ || a.n_ != b.n_) return false;
        return a.canonical().coords_ == b.canonical().coords_;
    }

private:
    std::size_t q_ = 0;
    std::size_t n_ = 0;
    std::vector<double> coords_;
};

/// A permutation of {0..Q-1}; perm[i] is the partner index of point i.
struct Matching {
    std::vector<std::size_t> perm;

    static Matching identity(std::size_t q)
    {
        Matching m;
        m.perm.resize(q);
        std::iota(m.perm.begin(), m.perm.end(), std::size_t{0});
        return m;
    }

    bool valid() const
    {
        std::vector<bool> seen(perm.size(), false);
        for (std::size_t j : perm) {
            if (j >= perm.size() || seen[j]) return false;
            seen[j] = true;
        }
        return true;
    }

    friend bool operator==(const Matching&, const Matching&) = default;
};

enum class MetricKind { G1, G2, GINF };

inline const char* to_string(MetricKind k)
{
    switch (k) {
    case MetricKind::G1: return "g1";
    case MetricKind::G2: return "g2";
    case MetricKind::GINF: return "ginf";
    }
    return "?";
}

inline MetricKind metric_from_string(const std::string& s)
{
    if (s == "g1" || s == "G1") return MetricKind::G1;
    if (s == "g2" || s == "G2") return MetricKind::G2;
    if (s == "ginf" || s == "GINF" || s == "Ginf") return MetricKind::GINF;
    throw InvalidInput("unknown metric kind '" + s + "' (expected g1, g2 or ginf)");
}

namespace detail {

inline double squared_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double d = a[j] - b[j];
        s += d * d;
    }
    return s;
}

inline double distance(std::span<const double> a, std::span<const double> b)
{
    return std::sqrt(squared_distance(a, b));
}

inline double norm(std::span<const double> a)
{
    double s = 0.0;
    for (double x : a) s += x * x;
    return std::sqrt(s);
}

inline void require_compatible(const QTuple& v, const QTuple& w, const char* op)
{
    if (v.Q() != w.Q() || v.n() != w.n())
        throw InvalidInput(std::string(op) + ": tuples differ in Q or n (" + std::to_string(v.Q()) + "x" +
                           std::to_string(v.n()) + " vs " + std::to_string(w.Q()) + "x" +
                           std::to_string(w.n()) + ")");
}

} // namespace detail
} // namespace qv
