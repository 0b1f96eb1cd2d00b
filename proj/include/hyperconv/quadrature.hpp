#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

#include "hyperconv/extended_real.hpp"
#include "hyperconv/specialfun.hpp"

// Adaptive 1-D quadrature on (0,1) for integrands with pure power endpoint
// behavior, plus the reduced Beta-type integral all the closed forms
// collapse to.

namespace hyperconv {

// coefficient * u^{p-1} (1-u)^{q-1} (1 - beta u)^{-s} on (0,1).
struct ReducedIntegrand {
    double coefficient = 1.0;
    double p = 1.0;
    double q = 1.0;
    double s = 0.0;
    double beta = 0.0;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1].
inline constexpr double gk_nodes[8] = {
    0.0,
    0.405845151377397166906606412076961,
    0.741531185599394439863864773280788,
    0.949107912342758524526189684047851,
    0.207784955007898467600689403773245,
    0.586087235467691130294144838258730,
    0.864864423359769072789712788640926,
    0.991455371120812639206854697526329,
};
inline constexpr double gk_wg[8] = {
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
    0.0, 0.0, 0.0, 0.0,
};
inline constexpr double gk_wk[8] = {
    0.209482141084727828012999174891714,
    0.190350578064785409913256402421014,
    0.140653259715525918745189590510238,
    0.063092092629978553290700663189204,
    0.204432940075298892414161999234649,
    0.169004726639267902826583426598550,
    0.104790010322250183839876322541518,
    0.022935322010529224963732008058970,
};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double f0 = f(c);
    double g = gk_wg[0] * f0, k = gk_wk[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * gk_nodes[i];
        const double fi = f(c + dx) + f(c - dx);
        g += gk_wg[i] * fi;
        k += gk_wk[i] * fi;
    }
    result = k * h;
    err = std::abs((k - g) * h);
}

struct AdaptiveState {
    long panels_left;
    int max_depth;
    // Per-level tolerance halving eventually drops below roundoff noise in the
    // panel error estimate; accept anything at that level or the recursion
    // can never terminate.
    double noise_floor;
};

template <class F>
inline double adapt(const F& f, double a, double b, double tol, AdaptiveState& st,
                    int depth) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= tol || e <= st.noise_floor || depth >= st.max_depth)
        return r;
    if (--st.panels_left <= 0)
        throw accuracy_error("integrate_adaptive: subdivision budget exhausted");
    const double m = 0.5 * (a + b);
    return adapt(f, a, m, 0.5 * tol, st, depth + 1) +
           adapt(f, m, b, 0.5 * tol, st, depth + 1);
}

} // namespace detail

struct QuadratureOptions {
    double rel_tol = 1e-9;        // target relative error (contract is 1e-8)
    long panel_budget = 1 << 20;  // "failed to converge" past this, not "diverges"
};

// Integrate g over (0,1) where g ~ u^{left} near 0 and ~ (1-u)^{right} near 1,
// both exponents > -1. The declared powers are removed exactly by the
// substitution u = t^m before adaptive refinement, so the transformed
// integrand is bounded at the endpoints.
template <class G>
inline double integrate_adaptive(const G& g, double left, double right,
                                 const QuadratureOptions& opt = {}) {
    if (!(left > -1.0) || !(right > -1.0))
        throw std::domain_error("integrate_adaptive: endpoint exponents must be > -1");

    auto half = [&g](double expo, bool from_right) {
        // int_0^{1/2} of the (possibly flipped) integrand, singular end at 0.
        const double m = expo < 0.0 ? 2.0 / (1.0 + expo) : 1.0;
        const double tmax = std::pow(0.5, 1.0 / m);
        auto h = [m, expo, from_right, &g](double t) {
            const double u = std::pow(t, m);
            if (u <= 0.0 || u >= 1.0)
                return 0.0;
            double gx;
            if (from_right && u < 1e-8) {
                // 1 - u loses most of u's bits to rounding here, which poisons
                // the singular factor; the endpoint behavior is a pure power,
                // so extrapolate from a reference point clear of the noise.
                // 1 - x_ref is exact, so the reference gap is the true one.
                const double x_ref = 1.0 - 1e-8;
                const double u_ref = 1.0 - x_ref;
                gx = g(x_ref) * std::pow(u / u_ref, expo);
            } else {
                gx = g(from_right ? 1.0 - u : u);
            }
            return m * std::pow(t, m - 1.0) * gx;
        };
        return std::pair<decltype(h), double>(h, tmax);
    };

    auto [hl, tl] = half(left, false);
    auto [hr, tr] = half(right, true);
    double rough_l, rough_r, e;
    detail::gk15(hl, 0.0, tl, rough_l, e);
    detail::gk15(hr, 0.0, tr, rough_r, e);
    const double scale = std::max(std::abs(rough_l) + std::abs(rough_r), 1e-300);
    const double tol = 0.5 * opt.rel_tol * scale;
    detail::AdaptiveState st{opt.panel_budget, 48, 1e-16 * scale};
    return detail::adapt(hl, 0.0, tl, tol, st, 0) +
           detail::adapt(hr, 0.0, tr, tol, st, 0);
}

// Convergence test is analytic: p,q must be positive, and when beta is at 1
// (within 1e-12, mirroring elliptic_k) the right endpoint needs q - s > 0.
inline ExtendedReal integrate_reduced(const ReducedIntegrand& f,
                                      const QuadratureOptions& opt = {}) {
    if (!(f.beta >= 0.0) || !(f.beta <= 1.0))
        throw std::domain_error("integrate_reduced: beta must be in [0,1]");
    if (!(f.p > 0.0) || !(f.q > 0.0))
        return ExtendedReal::infinity();
    const bool at_one = f.beta >= 1.0 - 1e-12;
    if (at_one && !(f.q - f.s > 0.0))
        return ExtendedReal::infinity();
    if (f.coefficient == 0.0)
        return ExtendedReal::finite(0.0);

    double val;
    if (at_one) {
        // the s-factor merges into the right endpoint power: exactly a Beta
        val = beta_fn(f.p, f.q - f.s);
    } else {
        auto g = [&](double u) {
            return std::pow(u, f.p - 1.0) * std::pow(1.0 - u, f.q - 1.0) *
                   std::pow(1.0 - f.beta * u, -f.s);
        };
        val = integrate_adaptive(g, f.p - 1.0, f.q - 1.0, opt);
    }
    return ExtendedReal::finite(f.coefficient * val);
}

} // namespace hyperconv
