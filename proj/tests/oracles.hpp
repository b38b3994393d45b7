// Test-side oracles, independent of the discrete operator path they check.
#pragma once

#include <cmath>
#include <functional>

#include "fracstefan/frac_operator.hpp"
#include "fracstefan/quadrature.hpp"

namespace fracstefan::oracles {

/**
 * Principal-value quadrature of (-Delta)^s v at x for v supported in [-1,1]:
 * symmetrized integrand over [a, 8], second-order Taylor on (0, a), analytic
 * tail beyond |y - x| > 8 where v = 0.
 */
inline Real pv_frac_laplacian(Real x, Real s, const std::function<Real(Real)>& v) {
    const Real C = frac_laplacian_constant(1, s);
    auto sym = [&](Real z) {
        return (2.0 * v(x) - v(x + z) - v(x - z)) / std::pow(z, 1.0 + 2.0 * s);
    };
    const Real a = 1e-3;
    Real h = 1e-5;
    Real vpp = (v(x + h) - 2.0 * v(x) + v(x - h)) / (h * h);
    Real near0 = -vpp * std::pow(a, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
    Real mid = adaptive_simpson(sym, a, 8.0, 1e-9);
    Real tail = v(x) * 2.0 * std::pow(8.0, -2.0 * s) / (2.0 * s);
    return C * (near0 + mid + tail);
}

/// Getoor profile (1 - |x|^2)_+^s; its image under (-Delta)^s is constant
/// on the unit ball, equal to 4^s Gamma(1+s) Gamma(d/2+s) / Gamma(d/2).
inline Real getoor_value(Real x, Real s) {
    Real t = 1.0 - x * x;
    return t > 0 ? std::pow(t, s) : 0.0;
}

inline Real getoor_constant(int d, Real s) {
    return std::pow(4.0, s) * std::tgamma(1.0 + s) * std::tgamma(0.5 * d + s) /
           std::tgamma(0.5 * d);
}

/// Regularized incomplete beta I_x(a,b) by continued fraction; used to
/// cross-check the numerically integrated exit-law CDF in closed form.
inline Real betacf(Real a, Real b, Real x) {
    const int kMax = 300;
    const Real tiny = 1e-300, eps = 1e-14;
    Real qab = a + b, qap = a + 1.0, qam = a - 1.0;
    Real c = 1.0, d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    Real h = d;
    for (int m = 1; m <= kMax; ++m) {
        int m2 = 2 * m;
        Real aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        Real del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < eps) break;
    }
    return h;
}

inline Real reg_inc_beta(Real a, Real b, Real x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    Real lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    Real front = std::exp(a * std::log(x) + b * std::log(1.0 - x) - lbeta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - std::exp(b * std::log(1.0 - x) + a * std::log(x) - lbeta) *
                     betacf(b, a, 1.0 - x) / b;
}

/// Closed-form CDF of |X_{tau_r}| for a start at the origin (d = 1):
/// P(|X| <= y) = 1 - I_{(r/y)^2}(s, 1-s) / B-normalization.
inline Real exit_radius_cdf_origin(Real s, Real r, Real y) {
    if (y <= r) return 0.0;
    Real z = (r / y) * (r / y);
    return 1.0 - reg_inc_beta(s, 1.0 - s, z);
}

}  // namespace fracstefan::oracles
