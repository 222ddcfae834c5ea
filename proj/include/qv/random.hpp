#pragma once

// Seeded generators for random tuples and grid functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qv/grid.hpp"
#include "qv/qtuple.hpp"

namespace qv {

struct TupleOptions {
    /// Probability that a point is placed near an earlier point of the
    /// same tuple instead of uniformly in [-1, 1]^n.
    double cluster_probability = 0.0;
    double cluster_radius = 1e-3;
    /// Probability that a point repeats an earlier point exactly.
    double duplicate_probability = 0.0;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = -1.0, double hi = 1.0)
    {
        return std::uniform_real_distribution<double>(lo, hi)(engine_);
    }
    double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    bool chance(double p) { return p > 0.0 && uniform(0.0, 1.0) < p; }

    Point point(std::size_t n, double lo = -1.0, double hi = 1.0)
    {
        Point p(n);
        for (double& x : p) x = uniform(lo, hi);
        return p;
    }

    Point unit_vector(std::size_t n)
    {
        Point p(n);
        double s = 0.0;
        do {
            for (double& x : p) x = gaussian();
            s = detail::norm(p);
        } while (s < 1e-12);
        for (double& x : p) x /= s;
        return p;
    }

    QTuple tuple(std::size_t Q, std::size_t n, const TupleOptions& opt = {})
    {
        std::vector<Point> pts;
        pts.reserve(Q);
        for (std::size_t i = 0; i < Q; ++i) {
            if (!pts.empty() && chance(opt.duplicate_probability)) {
                pts.push_back(pts[index(pts.size())]);
            } else if (!pts.empty() && chance(opt.cluster_probability)) {
                Point p = pts[index(pts.size())];
                for (double& x : p) x += uniform(-opt.cluster_radius, opt.cluster_radius);
                pts.push_back(std::move(p));
            } else {
                pts.push_back(point(n));
            }
        }
        return QTuple(pts);
    }

    /// w = v with every point moved by an independent uniform offset in
    /// [-r, r]^n.
    QTuple perturb(const QTuple& v, double r)
    {
        std::vector<double> c(v.coords().begin(), v.coords().end());
        for (double& x : c) x += uniform(-r, r);
        return QTuple(v.Q(), v.n(), std::move(c));
    }

    std::vector<std::size_t> permutation(std::size_t q)
    {
        std::vector<std::size_t> p(q);
        for (std::size_t i = 0; i < q; ++i) p[i] = i;
        std::shuffle(p.begin(), p.end(), engine_);
        return p;
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Fills every active node with an independent random tuple.
inline void randomize(GridFunction& g, Rng& rng, const TupleOptions& opt = {})
{
    for (std::size_t k = 0; k < g.node_count(); ++k)
        if (g.active(k)) g.values[k] = rng.tuple(g.Q, g.n, opt);
}

} // namespace qv
