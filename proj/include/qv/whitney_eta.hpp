#pragma once

// Whitney's embedding: a tuple maps to the coefficients of
// P_v(u, x) = prod_i (x - <u, y_i>), and for n = 1 back again by root finding.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qv/qtuple.hpp"

namespace qv {

/// Coefficient of u^alpha x^(Q - |alpha|) in P_v.
struct EtaTerm {
    std::vector<unsigned> alpha;
    double coeff = 0.0;
};

/// Number of coefficients with 1 <= |alpha| <= Q: C(Q + n, n) - 1.
inline std::size_t eta_count(std::size_t n, std::size_t Q)
{
    // C(Q + n, n) built incrementally stays integral at every step.
    std::uint64_t c = 1;
    for (std::size_t k = 1; k <= n; ++k) c = c * (Q + k) / k;
    return static_cast<std::size_t>(c - 1);
}

/// Coefficients of P_v ordered by total degree |alpha|, then alpha
/// lexicographically. The leading x^Q term (alpha = 0) is omitted. The
/// result depends only on the multiset v.
inline std::vector<EtaTerm> whitney_eta(const QTuple& v)
{
    const std::size_t n = v.n();
    const QTuple c = v.canonical();
    // Key: (|alpha|, alpha) so that map order is the output order.
    using Key = std::vector<unsigned>;
    auto key_less = [](const Key& a, const Key& b) {
        unsigned da = 0, db = 0;
        for (unsigned x : a) da += x;
        for (unsigned x : b) db += x;
        if (da != db) return da < db;
        return a < b;
    };
    std::map<Key, double, decltype(key_less)> poly(key_less);
    poly[Key(n, 0)] = 1.0;
    for (std::size_t i = 0; i < c.Q(); ++i) {
        auto y = c.point(i);
        std::map<Key, double, decltype(key_less)> next(key_less);
        for (const auto& [alpha, coeff] : poly) {
            next[alpha] += coeff; // times x
            for (std::size_t j = 0; j < n; ++j) {
                Key a = alpha;
                ++a[j];
                next[a] += -y[j] * coeff; // times -u_j y_j
            }
        }
        poly = std::move(next);
    }
    std::vector<EtaTerm> out;
    out.reserve(poly.size());
    for (const auto& [alpha, coeff] : poly) {
        bool zero = true;
        for (unsigned a : alpha) zero = zero && a == 0;
        if (zero) continue;
        // -0.0 and 0.0 print differently; normalise.
        out.push_back({alpha, coeff == 0.0 ? 0.0 : coeff});
    }
    return out;
}

/// Plain coefficient vector of whitney_eta.
inline std::vector<double> whitney_eta_coeffs(const QTuple& v)
{
    std::vector<double> out;
    for (const auto& t : whitney_eta(v)) out.push_back(t.coeff);
    return out;
}

namespace detail {

inline bool complex_less(const std::complex<double>& a, const std::complex<double>& b)
{
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

} // namespace detail

/// Complex variant for n = 1 over C, a tuple with n = 2 read as complex
/// numbers (re, im). Returns c_1..c_Q with prod (x - z_i) = x^Q + c_1 x^(Q-1) + ... + c_Q.
inline std::vector<std::complex<double>> whitney_eta_complex(const QTuple& v)
{
    if (v.n() != 2) throw InvalidInput("whitney_eta_complex: expects n == 2 (real, imaginary)");
    std::vector<std::complex<double>> roots;
    for (std::size_t i = 0; i < v.Q(); ++i) roots.emplace_back(v.point(i)[0], v.point(i)[1]);
    std::sort(roots.begin(), roots.end(), detail::complex_less);
    std::vector<std::complex<double>> poly{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k];
            next[k + 1] -= r * poly[k];
        }
        poly = std::move(next);
    }
    return {poly.begin() + 1, poly.end()};
}

enum class EtaField { real, complex };

/// Roots of x^Q + c_1 x^(Q-1) + ... + c_Q as a Q-tuple: eigenvalues of the
/// companion matrix, then a few Newton steps each, kept only if they reduce
/// |P|. EtaField::real returns the real parts (n = 1), EtaField::complex
/// returns (re, im) pairs (n = 2).
inline QTuple whitney_eta_inverse_1d(std::span<const std::complex<double>> coeffs, EtaField field = EtaField::complex)
{
    const std::size_t Q = coeffs.size();
    detail::require(Q >= 1, "whitney_eta_inverse_1d: need at least one coefficient");
    for (const auto& c : coeffs)
        detail::require(std::isfinite(c.real()) && std::isfinite(c.imag()),
                        "whitney_eta_inverse_1d: coefficients must be finite");

    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(Q, Q);
    for (std::size_t k = 0; k < Q; ++k) companion(0, k) = -coeffs[k];
    for (std::size_t k = 1; k < Q; ++k) companion(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    std::vector<std::complex<double>> roots(Q);
    for (std::size_t k = 0; k < Q; ++k) roots[k] = solver.eigenvalues()[k];

    auto eval = [&](std::complex<double> z, std::complex<double>& deriv) {
        std::complex<double> p = 1.0;
        deriv = 0.0;
        for (const auto& c : coeffs) {
            deriv = deriv * z + p;
            p = p * z + c;
        }
        return p;
    };
    // Newton steps stay within a third of the gap to the nearest other root so
    // that polishing cannot merge two eigenvalues.
    std::vector<double> reach(Q, std::numeric_limits<double>::infinity());
    for (std::size_t a = 0; a < Q; ++a)
        for (std::size_t b = 0; b < Q; ++b)
            if (a != b) reach[a] = std::min(reach[a], std::abs(roots[a] - roots[b]) / 3.0);
    for (std::size_t k = 0; k < Q; ++k) {
        auto& r = roots[k];
        const std::complex<double> start = r;
        for (int it = 0; it < 3; ++it) {
            std::complex<double> d;
            const std::complex<double> p = eval(r, d);
            if (p == 0.0 || d == 0.0) break;
            const std::complex<double> cand = r - p / d;
            std::complex<double> dc;
            if (std::abs(cand - start) < reach[k] && std::abs(eval(cand, dc)) < std::abs(p))
                r = cand;
            else
                break;
        }
    }
    std::sort(roots.begin(), roots.end(), detail::complex_less);

    std::vector<double> coords;
    for (const auto& r : roots) {
        coords.push_back(r.real());
        if (field == EtaField::complex) coords.push_back(r.imag());
    }
    return QTuple(Q, field == EtaField::complex ? 2 : 1, std::move(coords)).canonical();
}

inline QTuple whitney_eta_inverse_1d(std::span<const double> coeffs, EtaField field = EtaField::real)
{
    std::vector<std::complex<double>> c(coeffs.begin(), coeffs.end());
    return whitney_eta_inverse_1d(std::span<const std::complex<double>>(c), field);
}

} // namespace qv
