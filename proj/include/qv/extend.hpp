#pragma once

// Lipschitz extension of Q-valued data: the cone construction on balls, the
// dyadic Whitney construction for m <= 2, and the extension of a unit-ball
// grid function to [-2, 2]^m.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "qv/grid.hpp"
#include "qv/qspace.hpp"

namespace qv {

enum class NormKind { l2, linf };

namespace detail {

inline double norm_of(std::span<const double> x, NormKind k)
{
    if (k == NormKind::l2) return norm(x);
    double s = 0.0;
    for (double v : x) s = std::max(s, std::abs(v));
    return s;
}

inline double linf_distance(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s = std::max(s, std::abs(a[j] - b[j]));
    return s;
}

} // namespace detail

/// Values of a Q-valued map at points of the sphere |x| = R in R^m.
struct BoundaryPoint {
    Point x;
    QTuple v;
};

struct BoundarySample {
    std::size_t m = 0;
    double R = 1.0;
    std::vector<BoundaryPoint> points;

    void validate() const
    {
        detail::require(m >= 1, "boundary sample: m must be positive");
        detail::require(std::isfinite(R) && R > 0.0, "boundary sample: R must be positive");
        detail::require(!points.empty(), "boundary sample: no points");
        const std::size_t q = points.front().v.Q(), n = points.front().v.n();
        for (std::size_t k = 0; k < points.size(); ++k) {
            const auto& p = points[k];
            detail::require(p.x.size() == m, "boundary sample: point " + std::to_string(k) + " has wrong dimension");
            detail::require(std::abs(detail::norm(p.x) - R) <= 1e-9,
                            "boundary sample: point " + std::to_string(k) + " is not on the sphere");
            detail::require(p.v.Q() == q && p.v.n() == n,
                            "boundary sample: value " + std::to_string(k) + " has wrong Q or n");
        }
    }
};

/// The cone construction on the ball {|x - c| <= R} (l2 or l-infinity norm)
/// for a map known on the boundary sphere.
///
/// If some probe value has two points farther apart than 3 Q osc, the map is
/// split into two sub-maps along a group J1 of points near each other and the
/// construction recurses on both; otherwise values are filled radially,
/// y_i(x) = y1 + (|x|/R) (y_i(R x/|x|) - y1), with y1 the first point of the
/// first probe value. The oscillation is the largest G_inf distance between
/// probe values.
class Cone {
public:
    using BoundaryFn = std::function<QTuple(std::span<const double>)>;

    Cone(Point center, double R, NormKind norm, std::vector<Point> probes, std::vector<QTuple> probe_values,
         BoundaryFn boundary)
        : c_(std::move(center)), R_(R), norm_(norm), f_(std::move(boundary))
    {
        detail::require(!probes.empty() && probes.size() == probe_values.size(), "cone: needs probe values");
        detail::require(std::isfinite(R_) && R_ > 0.0, "cone: radius must be positive");
        q_ = probe_values.front().Q();
        for (std::size_t a = 0; a < probe_values.size(); ++a)
            for (std::size_t b = a + 1; b < probe_values.size(); ++b)
                osc_ = std::max(osc_, distance(probe_values[a], probe_values[b], MetricKind::GINF));

        if (q_ >= 2 && try_split(probes, probe_values)) return;
        const QTuple first = probe_values.front().canonical();
        y1_.assign(first.point(0).begin(), first.point(0).end());
    }

    QTuple operator()(std::span<const double> x) const
    {
        Point d(x.begin(), x.end());
        for (std::size_t a = 0; a < d.size(); ++a) d[a] -= c_[a];
        const double r = detail::norm_of(d, norm_);
        if (r >= R_ * (1.0 - 1e-12)) return f_(x);
        if (parts_[0]) return concatenate((*parts_[0])(x), (*parts_[1])(x));
        if (r == 0.0) return QTuple::repeated(q_, y1_);

        Point proj(d.size());
        for (std::size_t a = 0; a < d.size(); ++a) proj[a] = c_[a] + d[a] * (R_ / r);
        const QTuple fx = f_(proj);
        const double t = r / R_;
        std::vector<double> out(fx.coords().begin(), fx.coords().end());
        const std::size_t n = fx.n();
        for (std::size_t i = 0; i < q_; ++i)
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] = y1_[j] + t * (out[i * n + j] - y1_[j]);
        return QTuple(q_, n, std::move(out));
    }

    std::size_t Q() const noexcept { return q_; }
    double oscillation() const noexcept { return osc_; }
    bool is_split() const noexcept { return static_cast<bool>(parts_[0]); }
    const Cone* part(std::size_t k) const { return parts_.at(k).get(); }

private:
    // Picks x0 and a pair i1, i2 with |y_i1 - y_i2| > 3 Q osc; J1 grows from
    // i1 one index at a time while all pairwise distances stay within
    // 3 (|J1| - 1) osc. No further single index can join, which already
    // forces every point outside J1 to sit more than 3 osc away from J1.
    bool try_split(const std::vector<Point>& probes, const std::vector<QTuple>& values)
    {
        const double threshold = 3.0 * static_cast<double>(q_) * osc_;
        for (std::size_t k = 0; k < values.size(); ++k) {
            const QTuple y = values[k].canonical();
            for (std::size_t i1 = 0; i1 < q_; ++i1)
                for (std::size_t i2 = i1 + 1; i2 < q_; ++i2) {
                    if (!(detail::distance(y.point(i1), y.point(i2)) > threshold)) continue;
                    std::vector<bool> in(q_, false);
                    in[i1] = true;
                    std::size_t size = 1;
                    for (bool grew = true; grew;) {
                        grew = false;
                        for (std::size_t j = 0; j < q_; ++j) {
                            if (in[j]) continue;
                            bool fits = true;
                            for (std::size_t a = 0; a < q_ && fits; ++a)
                                if (in[a] && detail::distance(y.point(a), y.point(j)) >
                                                 3.0 * static_cast<double>(size) * osc_)
                                    fits = false;
                            if (fits) {
                                in[j] = true;
                                ++size;
                                grew = true;
                            }
                        }
                    }
                    for (std::size_t j = 0; j < q_; ++j) groups_[in[j] ? 0 : 1].push_back(j);
                    for (std::size_t g = 0; g < 2; ++g) {
                        auto select = [y, group = groups_[g]](const QTuple& fx) {
                            const DistResult d = dist(y, fx, MetricKind::GINF);
                            std::vector<double> c;
                            for (std::size_t i : group) {
                                auto p = fx.point(d.match.perm[i]);
                                c.insert(c.end(), p.begin(), p.end());
                            }
                            return QTuple(group.size(), fx.n(), std::move(c));
                        };
                        std::vector<QTuple> sub;
                        sub.reserve(values.size());
                        for (const auto& v : values) sub.push_back(select(v));
                        BoundaryFn parent = f_;
                        BoundaryFn fn = [parent, select](std::span<const double> x) { return select(parent(x)); };
                        parts_[g] = std::make_shared<const Cone>(c_, R_, norm_, probes, std::move(sub), std::move(fn));
                    }
                    return true;
                }
        }
        return false;
    }

    Point c_;
    double R_;
    NormKind norm_;
    BoundaryFn f_;
    std::size_t q_ = 0;
    double osc_ = 0.0;
    Point y1_;
    std::array<std::vector<std::size_t>, 2> groups_;
    std::array<std::shared_ptr<const Cone>, 2> parts_;
};

/// Cone extension of spherical boundary samples to the closed ball. Between
/// samples the boundary map takes the value of the nearest sample.
class ConeExtension {
public:
    explicit ConeExtension(BoundarySample samples)
        : s_(std::make_shared<const BoundarySample>(std::move(samples))), cone_(build(s_))
    {
    }

    QTuple operator()(std::span<const double> x) const
    {
        if (x.size() != s_->m) throw InvalidInput("cone_extend: query has wrong dimension");
        if (!(detail::norm(x) <= s_->R * (1.0 + 1e-9)))
            throw InvalidInput("cone_extend: query lies outside the ball");
        return cone_(x);
    }

    const Cone& cone() const noexcept { return cone_; }
    const BoundarySample& samples() const noexcept { return *s_; }

private:
    static Cone build(const std::shared_ptr<const BoundarySample>& s)
    {
        s->validate();
        std::vector<Point> probes;
        std::vector<QTuple> values;
        for (const auto& p : s->points) {
            probes.push_back(p.x);
            values.push_back(p.v);
        }
        auto nearest = [s](std::span<const double> x) {
            std::size_t best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < s->points.size(); ++k) {
                const double d = detail::squared_distance(s->points[k].x, x);
                if (d < bd) {
                    bd = d;
                    best = k;
                }
            }
            return s->points[best].v;
        };
        return Cone(Point(s->m, 0.0), s->R, NormKind::l2, std::move(probes), std::move(values), nearest);
    }

    std::shared_ptr<const BoundarySample> s_;
    Cone cone_;
};

inline QTuple cone_extend(const BoundarySample& samples, std::span<const double> query)
{
    return ConeExtension(samples)(query);
}

struct Box {
    Point lo;
    Point hi;
};

inline constexpr std::size_t whitney_max_depth = 20;

/// Whitney-type extension on a box in l-infinity^m, m in {1, 2}.
///
/// The smallest cube containing the box is bisected dyadically; a cube is
/// accepted once its side is below its distance to the data, and cubes still
/// touching the data at the depth cap stay unresolved. Vertices of accepted
/// cubes take the value of the nearest data point, edges (split at every
/// vertex lying on them) carry 1-D cone extensions of their end values, and
/// for m = 2 each accepted square carries the cone extension of its boundary.
/// Unresolved cells answer with the nearest data point.
class WhitneyExtension {
public:
    struct Vertex {
        Point x;
        std::size_t sample = 0; ///< index of the nearest data point
    };
    struct Cube {
        Point lo;
        double side = 0.0;
        double dist = 0.0; ///< l-infinity distance to the data
        std::vector<std::size_t> vertices;
    };

    WhitneyExtension(std::vector<Point> locations, std::vector<QTuple> values, Box box, std::size_t depth)
        : loc_(std::move(locations)), val_(std::move(values)), box_(std::move(box)), D_(depth)
    {
        validate();
        side_ = 0.0;
        for (std::size_t a = 0; a < m_; ++a) side_ = std::max(side_, box_.hi[a] - box_.lo[a]);
        scale_ = static_cast<double>(std::uint64_t{1} << D_);
        std::vector<std::size_t> all(loc_.size());
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = k;
        cells_.push_back(Cell{});
        build(0, all);
        if (m_ == 2)
            for (std::size_t c = 0; c < cells_.size(); ++c)
                if (cells_[c].state == State::accepted) faces_.emplace(c, make_face(c));
    }

    // Face cones refer back to this object.
    WhitneyExtension(const WhitneyExtension&) = delete;
    WhitneyExtension& operator=(const WhitneyExtension&) = delete;

    QTuple operator()(std::span<const double> x) const
    {
        if (x.size() != m_) throw InvalidInput("whitney_extend: query has wrong dimension");
        for (std::size_t k = 0; k < loc_.size(); ++k)
            if (std::equal(x.begin(), x.end(), loc_[k].begin())) return val_[k];
        for (std::size_t a = 0; a < m_; ++a)
            if (!(x[a] >= box_.lo[a] && x[a] <= box_.hi[a]))
                throw InvalidInput("whitney_extend: query lies outside the box");

        std::size_t c = 0;
        while (cells_[c].state == State::split) {
            const Cell& cell = cells_[c];
            const std::uint64_t half = span(cell.level + 1);
            std::size_t child = 0;
            for (std::size_t a = 0; a < m_; ++a)
                if (x[a] >= coord(a, cell.corner[a] + half)) child |= std::size_t{1} << a;
            c = cell.child[child];
        }
        const Cell& cell = cells_[c];
        if (cell.state == State::unresolved) return val_[nearest_sample(x)];
        if (m_ == 1) return on_edge(0, 0, cell.corner[0], cell.corner[0] + span(cell.level), x[0]);
        return faces_.at(c)(x);
    }

    std::size_t accepted_count() const { return count(State::accepted); }
    std::size_t unresolved_count() const { return count(State::unresolved); }
    const std::vector<Vertex>& vertices() const noexcept { return vertices_; }
    const QTuple& vertex_value(std::size_t k) const { return val_[vertices_[k].sample]; }

    std::vector<Cube> accepted_cubes() const
    {
        std::vector<Cube> out;
        for (const Cell& cell : cells_) {
            if (cell.state != State::accepted) continue;
            Cube cube;
            for (std::size_t a = 0; a < m_; ++a) cube.lo.push_back(coord(a, cell.corner[a]));
            cube.side = side_ / static_cast<double>(std::uint64_t{1} << cell.level);
            cube.dist = cell.dist;
            for (std::size_t corner = 0; corner < (std::size_t{1} << m_); ++corner) {
                std::array<std::uint64_t, 2> v{cell.corner[0], m_ == 2 ? cell.corner[1] : 0};
                for (std::size_t a = 0; a < m_; ++a)
                    if (corner >> a & 1) v[a] += span(cell.level);
                cube.vertices.push_back(vertex_index_.at(key(v)));
            }
            out.push_back(std::move(cube));
        }
        return out;
    }

private:
    enum class State : std::uint8_t { split, accepted, unresolved };
    struct Cell {
        std::size_t level = 0;
        std::array<std::uint64_t, 2> corner{0, 0}; ///< finest-level integer coordinates
        State state = State::split;
        double dist = 0.0;
        std::array<std::size_t, 4> child{0, 0, 0, 0};
    };

    void validate()
    {
        detail::require(D_ <= whitney_max_depth,
                        "whitney_extend: depth " + std::to_string(D_) + " exceeds the cap of " +
                            std::to_string(whitney_max_depth));
        detail::require(!loc_.empty() && loc_.size() == val_.size(), "whitney_extend: needs data points");
        m_ = box_.lo.size();
        detail::require(m_ == 1 || m_ == 2, "whitney_extend: only m = 1 or m = 2 is supported");
        detail::require(box_.hi.size() == m_, "whitney_extend: box corners differ in dimension");
        for (std::size_t a = 0; a < m_; ++a)
            detail::require(std::isfinite(box_.lo[a]) && std::isfinite(box_.hi[a]) && box_.lo[a] < box_.hi[a],
                            "whitney_extend: empty box");
        const std::size_t q = val_.front().Q(), n = val_.front().n();
        for (std::size_t k = 0; k < loc_.size(); ++k) {
            detail::require(loc_[k].size() == m_, "whitney_extend: data point has wrong dimension");
            detail::require(val_[k].Q() == q && val_[k].n() == n, "whitney_extend: values differ in Q or n");
            for (std::size_t a = 0; a < m_; ++a)
                detail::require(loc_[k][a] >= box_.lo[a] && loc_[k][a] <= box_.hi[a],
                                "whitney_extend: data point outside the box");
            for (std::size_t j = 0; j < k; ++j)
                detail::require(loc_[j] != loc_[k], "whitney_extend: repeated data location");
        }
    }

    std::uint64_t span(std::size_t level) const { return std::uint64_t{1} << (D_ - level); }
    double coord(std::size_t axis, std::uint64_t k) const
    {
        return box_.lo[axis] + side_ * (static_cast<double>(k) / scale_);
    }
    std::uint64_t key(const std::array<std::uint64_t, 2>& v) const
    {
        return v[0] * ((std::uint64_t{1} << D_) + 1) + v[1];
    }

    std::size_t count(State s) const
    {
        std::size_t c = 0;
        for (const Cell& cell : cells_) c += cell.state == s;
        return c;
    }

    double cell_distance(const Cell& cell, std::size_t sample) const
    {
        double d = 0.0;
        for (std::size_t a = 0; a < m_; ++a) {
            const double lo = coord(a, cell.corner[a]);
            const double hi = coord(a, cell.corner[a] + span(cell.level));
            const double x = loc_[sample][a];
            d = std::max(d, std::max({0.0, lo - x, x - hi}));
        }
        return d;
    }

    void build(std::size_t c, const std::vector<std::size_t>& candidates)
    {
        const double side = side_ / static_cast<double>(std::uint64_t{1} << cells_[c].level);
        std::vector<double> d(candidates.size());
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            d[k] = cell_distance(cells_[c], candidates[k]);
            best = std::min(best, d[k]);
        }
        cells_[c].dist = best;
        if (side < best) {
            cells_[c].state = State::accepted;
            register_vertices(c, candidates);
            return;
        }
        if (cells_[c].level == D_) {
            cells_[c].state = State::unresolved;
            return;
        }
        // Points farther than dist + side from this cube cannot be nearest to
        // anything inside it.
        std::vector<std::size_t> keep;
        const double limit = (best + side) * (1.0 + 1e-12) + 1e-300;
        for (std::size_t k = 0; k < candidates.size(); ++k)
            if (d[k] <= limit) keep.push_back(candidates[k]);

        const std::size_t level = cells_[c].level + 1;
        const std::uint64_t half = span(level);
        for (std::size_t child = 0; child < (std::size_t{1} << m_); ++child) {
            Cell sub;
            sub.level = level;
            sub.corner = cells_[c].corner;
            for (std::size_t a = 0; a < m_; ++a)
                if (child >> a & 1) sub.corner[a] += half;
            cells_[c].child[child] = cells_.size();
            cells_.push_back(sub);
            build(cells_[c].child[child], keep);
        }
    }

    void register_vertices(std::size_t c, const std::vector<std::size_t>& candidates)
    {
        const Cell cell = cells_[c];
        for (std::size_t corner = 0; corner < (std::size_t{1} << m_); ++corner) {
            std::array<std::uint64_t, 2> v{cell.corner[0], m_ == 2 ? cell.corner[1] : 0};
            for (std::size_t a = 0; a < m_; ++a)
                if (corner >> a & 1) v[a] += span(cell.level);
            const std::uint64_t k = key(v);
            if (vertex_index_.count(k)) continue;
            Vertex vert;
            for (std::size_t a = 0; a < m_; ++a) vert.x.push_back(coord(a, v[a]));
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t s : candidates) {
                const double d = detail::linf_distance(vert.x, loc_[s]);
                if (d < bd || (d == bd && s < vert.sample)) {
                    bd = d;
                    vert.sample = s;
                }
            }
            vertex_index_.emplace(k, vertices_.size());
            vertices_.push_back(std::move(vert));
            if (m_ == 1) {
                lines_[0][0].insert(v[0]);
            } else {
                lines_[0][v[1]].insert(v[0]); // horizontal line y = v[1]
                lines_[1][v[0]].insert(v[1]); // vertical line x = v[0]
            }
        }
    }

    const QTuple& value_at(std::size_t axis, std::uint64_t line, std::uint64_t k) const
    {
        std::array<std::uint64_t, 2> v{0, 0};
        if (m_ == 1) {
            v[0] = k;
        } else if (axis == 0) {
            v = {k, line};
        } else {
            v = {line, k};
        }
        return val_[vertices_[vertex_index_.at(key(v))].sample];
    }

    // Value at coordinate t along the edge [e0, e1] of `line` running along
    // `axis`: the vertices on the edge cut it into segments, each carrying the
    // 1-D cone extension of its end values.
    QTuple on_edge(std::size_t axis, std::uint64_t line, std::uint64_t e0, std::uint64_t e1, double t) const
    {
        const auto& verts = lines_[axis].at(line);
        t = std::clamp(t, coord(axis, e0), coord(axis, e1));
        auto it = verts.lower_bound(e0);
        std::uint64_t a = *it;
        while (std::next(it) != verts.end() && *std::next(it) <= e1 && coord(axis, *std::next(it)) <= t) {
            ++it;
            a = *it;
        }
        if (coord(axis, a) == t) return value_at(axis, line, a);
        const std::uint64_t b = *std::next(it);
        if (coord(axis, b) == t) return value_at(axis, line, b);
        const double lo = coord(axis, a), hi = coord(axis, b);
        const QTuple& va = value_at(axis, line, a);
        const QTuple& vb = value_at(axis, line, b);
        const double mid = 0.5 * (lo + hi);
        Cone seg(Point{mid}, 0.5 * (hi - lo), NormKind::l2, {Point{lo}, Point{hi}}, {va, vb},
                 [mid, va, vb](std::span<const double> x) { return x[0] < mid ? va : vb; });
        return seg(std::array<double, 1>{t});
    }

    QTuple on_square_boundary(const Cell& cell, std::span<const double> p) const
    {
        const std::uint64_t s = span(cell.level);
        const double cx = coord(0, cell.corner[0]) + 0.5 * (coord(0, cell.corner[0] + s) - coord(0, cell.corner[0]));
        const double cy = coord(1, cell.corner[1]) + 0.5 * (coord(1, cell.corner[1] + s) - coord(1, cell.corner[1]));
        if (std::abs(p[1] - cy) >= std::abs(p[0] - cx)) {
            const std::uint64_t y = p[1] < cy ? cell.corner[1] : cell.corner[1] + s;
            return on_edge(0, y, cell.corner[0], cell.corner[0] + s, p[0]);
        }
        const std::uint64_t x = p[0] < cx ? cell.corner[0] : cell.corner[0] + s;
        return on_edge(1, x, cell.corner[1], cell.corner[1] + s, p[1]);
    }

    Cone make_face(std::size_t c) const
    {
        const Cell& cell = cells_[c];
        const std::uint64_t s = span(cell.level);
        const double x0 = coord(0, cell.corner[0]), x1 = coord(0, cell.corner[0] + s);
        const double y0 = coord(1, cell.corner[1]), y1 = coord(1, cell.corner[1] + s);
        Point center{x0 + 0.5 * (x1 - x0), y0 + 0.5 * (y1 - y0)};

        std::vector<Point> probes;
        auto add_edge = [&](std::size_t axis, std::uint64_t line, std::uint64_t e0, double fixed) {
            const auto& verts = lines_[axis].at(line);
            double prev = std::numeric_limits<double>::quiet_NaN();
            for (auto it = verts.lower_bound(e0); it != verts.end() && *it <= e0 + s; ++it) {
                const double t = coord(axis, *it);
                if (!std::isnan(prev)) {
                    const double mid = 0.5 * (prev + t);
                    probes.push_back(axis == 0 ? Point{mid, fixed} : Point{fixed, mid});
                }
                probes.push_back(axis == 0 ? Point{t, fixed} : Point{fixed, t});
                prev = t;
            }
        };
        add_edge(0, cell.corner[1], cell.corner[0], y0);
        add_edge(0, cell.corner[1] + s, cell.corner[0], y1);
        add_edge(1, cell.corner[0], cell.corner[1], x0);
        add_edge(1, cell.corner[0] + s, cell.corner[1], x1);

        std::vector<QTuple> values;
        values.reserve(probes.size());
        for (const auto& p : probes) values.push_back(on_square_boundary(cell, p));
        // `this` outlives the face cones it owns.
        Cone::BoundaryFn fn = [this, c](std::span<const double> p) { return on_square_boundary(cells_[c], p); };
        return Cone(std::move(center), 0.5 * (x1 - x0), NormKind::linf, std::move(probes), std::move(values),
                    std::move(fn));
    }

    std::size_t nearest_sample(std::span<const double> x) const
    {
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < loc_.size(); ++k) {
            const double d = detail::linf_distance(x, loc_[k]);
            if (d < bd) {
                bd = d;
                best = k;
            }
        }
        return best;
    }

    std::vector<Point> loc_;
    std::vector<QTuple> val_;
    Box box_;
    std::size_t D_ = 0;
    std::size_t m_ = 0;
    double side_ = 0.0;
    double scale_ = 1.0;
    std::vector<Cell> cells_;
    std::vector<Vertex> vertices_;
    std::unordered_map<std::uint64_t, std::size_t> vertex_index_;
    std::array<std::map<std::uint64_t, std::set<std::uint64_t>>, 2> lines_;
    std::map<std::size_t, Cone> faces_;
};

inline QTuple whitney_extend(const std::vector<Point>& locations, const std::vector<QTuple>& values, const Box& box,
                             std::size_t depth, std::span<const double> query)
{
    return WhitneyExtension(locations, values, box, depth)(query);
}

namespace detail {

/// Nearest non-outside node to x (Euclidean), lowest index on ties;
/// searches shells of index offsets around the rounded position.
inline std::size_t nearest_active(const GridFunction& g, std::span<const double> x)
{
    const std::size_t m = g.m;
    std::vector<long long> base(m);
    double slack = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
        const double u = (x[a] - g.origin[a]) / g.h;
        base[a] = std::clamp<long long>(std::llround(u), 0, static_cast<long long>(g.shape[a]) - 1);
        slack = std::max(slack, std::abs(x[a] - (g.origin[a] + g.h * static_cast<double>(base[a]))));
    }
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double bd = std::numeric_limits<double>::infinity();
    std::size_t max_shell = 0;
    for (std::size_t s : g.shape) max_shell = std::max(max_shell, s);
    std::vector<long long> off(m);
    std::vector<std::size_t> idx(m);
    for (long long k = 0; k <= static_cast<long long>(max_shell); ++k) {
        // Enumerate offsets in [-k, k]^m with max |offset| == k.
        std::fill(off.begin(), off.end(), -k);
        while (true) {
            long long mx = 0;
            bool inside = true;
            for (std::size_t a = 0; a < m; ++a) {
                mx = std::max(mx, std::abs(off[a]));
                const long long i = base[a] + off[a];
                if (i < 0 || i >= static_cast<long long>(g.shape[a])) inside = false;
                else idx[a] = static_cast<std::size_t>(i);
            }
            if (inside && mx == k) {
                const std::size_t node = g.linear(idx);
                if (g.active(node)) {
                    const double d = squared_distance(g.location(node), x);
                    if (d < bd || (d == bd && node < best)) {
                        bd = d;
                        best = node;
                    }
                }
            }
            std::size_t a = 0;
            while (a < m && off[a] == k) off[a++] = -k;
            if (a == m) break;
            ++off[a];
        }
        if (best != std::numeric_limits<std::size_t>::max() &&
            std::sqrt(bd) < static_cast<double>(k + 1) * g.h - slack)
            break;
    }
    if (best == std::numeric_limits<std::size_t>::max()) throw InvalidInput("grid has no active nodes");
    return best;
}

} // namespace detail

/// Extends a map on the unit-ball grid (box [-1, 1]^m) to a grid with the
/// same spacing and node alignment covering [-2, 2]^m: f inside the unit
/// ball, the reflected and radially damped values (2|phi(x)| - 1) f(phi(x)),
/// phi(x) = (2/|x| - 1) x, for 1 < |x| < 3/2, and Q[[0]] for |x| >= 3/2.
/// Values of f off its nodes come from the nearest non-outside node.
inline GridFunction extend_to_plane(const GridFunction& f)
{
    f.validate();
    for (std::size_t a = 0; a < f.m; ++a) {
        detail::require(f.origin[a] == -1.0, "extend_to_plane: input grid must start at -1 on every axis");
        detail::require(f.shape[a] == f.shape[0], "extend_to_plane: input grid must be square");
        detail::require(std::abs(f.h * static_cast<double>(f.shape[a] - 1) - 2.0) <= 1e-12,
                        "extend_to_plane: input grid must span [-1, 1] on every axis");
    }
    // Pad by enough whole steps to reach 2 so input nodes stay nodes.
    const auto pad = static_cast<std::size_t>(std::ceil(1.0 / f.h - 1e-9));
    GridFunction g;
    g.m = f.m;
    g.n = f.n;
    g.Q = f.Q;
    g.h = f.h;
    g.shape.assign(f.m, f.shape[0] + 2 * pad);
    g.origin.assign(f.m, -1.0 - static_cast<double>(pad) * f.h);
    const std::size_t total = g.node_count();
    g.mask.assign(total, NodeKind::interior);
    g.values.assign(total, QTuple::zero(f.Q, f.n));
    std::vector<std::size_t> src(f.m);
    for (std::size_t k = 0; k < total; ++k) {
        const auto idx = g.multi_index(k);
        bool on_input = true;
        for (std::size_t a = 0; a < f.m; ++a) {
            if (idx[a] == 0 || idx[a] + 1 == g.shape[a]) g.mask[k] = NodeKind::boundary;
            if (idx[a] < pad || idx[a] >= pad + f.shape[a]) on_input = false;
            else src[a] = idx[a] - pad;
        }
        Point x(f.m);
        for (std::size_t a = 0; a < f.m; ++a)
            x[a] = on_input ? f.origin[a] + f.h * static_cast<double>(src[a]) : g.location(k)[a];
        const double r = detail::norm(x);
        if (r >= 1.5) continue; // stays Q[[0]]
        if (r <= 1.0) {
            const std::size_t node = on_input ? f.linear(src) : f.node_count();
            g.values[k] = (node < f.node_count() && f.active(node)) ? f.values[node]
                                                                     : f.values[detail::nearest_active(f, x)];
            continue;
        }
        Point y(x.size());
        const double s = 2.0 / r - 1.0;
        for (std::size_t a = 0; a < x.size(); ++a) y[a] = s * x[a];
        const double ry = detail::norm(y);
        g.values[k] = f.values[detail::nearest_active(f, y)].scaled(2.0 * ry - 1.0);
    }
    return g;
}

} // namespace qv
