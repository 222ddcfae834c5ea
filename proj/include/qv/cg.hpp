#pragma once

// Matrix-free conjugate gradients for symmetric positive definite systems.

#include <cmath>
#include <cstddef>
#include <vector>

namespace qv {

struct CgResult {
    std::size_t iterations = 0;
    double residual = 0.0; ///< final |b - A x|
    bool converged = false;
};

/// Solves A x = b starting from the given x; apply(in, out) writes A in.
/// Stops once |b - A x| <= rel_tol |b|.
template <class Apply>
CgResult conjugate_gradient(Apply&& apply, const std::vector<double>& b, std::vector<double>& x, double rel_tol,
                            std::size_t max_iter)
{
    const std::size_t n = b.size();
    auto dot = [n](const std::vector<double>& u, const std::vector<double>& v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
        return s;
    };
    std::vector<double> r(n), p(n), ap(n);
    apply(x, ap);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - ap[i];
    const double target = rel_tol * std::sqrt(dot(b, b));
    double rr = dot(r, r);
    CgResult out;
    p = r;
    while (std::sqrt(rr) > target && out.iterations < max_iter) {
        apply(p, ap);
        const double pap = dot(p, ap);
        if (!(pap > 0.0)) break;
        const double alpha = rr / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        rr = rr_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
        ++out.iterations;
    }
    out.residual = std::sqrt(rr);
    out.converged = out.residual <= target;
    return out;
}

} // namespace qv
