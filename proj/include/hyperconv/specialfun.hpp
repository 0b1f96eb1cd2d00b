#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hyperconv/extended_real.hpp"

// Special-function kernel: log-gamma, Beta, Gauss 2F1 in the Euler regime,
// complete elliptic integral K by AGM, sphere surface areas.
// All functions are pure and thread-safe.

namespace hyperconv {

namespace detail {

// Lanczos approximation, g = 7, 9 terms. Good to ~1e-14 relative for x > 0.
inline double lanczos_ln_gamma(double x) {
    static constexpr double g = 7.0;
    static constexpr double coef[9] = {
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    };
    const double z = x - 1.0;
    double sum = coef[0];
    for (int i = 1; i < 9; ++i)
        sum += coef[i] / (z + i);
    const double t = z + g + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
           std::log(sum);
}

} // namespace detail

inline double ln_gamma(double x) {
    if (!(x > 0.0))
        throw std::domain_error("ln_gamma: requires x > 0");
    // Push small arguments up with the recurrence; the Lanczos sum loses
    // accuracy as x -> 0 because Gamma blows up like 1/x.
    if (x < 0.5)
        return detail::lanczos_ln_gamma(x + 1.0) - std::log(x);
    return detail::lanczos_ln_gamma(x);
}

inline double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("beta_fn: requires a > 0 and b > 0");
    return std::exp(ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b));
}

// Gauss hypergeometric F(a,b;c;z), Euler-integral regime only:
// c > b > 0 and 0 <= z < 1. Plain power series; terms decay like
// k^{a+b-c-1} z^k so this converges for every z < 1 we need.
inline double gauss_2f1(double a, double b, double c, double z) {
    if (!(c > b) || !(b > 0.0))
        throw std::domain_error("gauss_2f1: requires c > b > 0");
    if (!(z >= 0.0) || !(z <= 1.0))
        throw std::domain_error("gauss_2f1: requires 0 <= z <= 1");
    if (z >= 1.0 - 1e-12) {
        if (c - a - b <= 0.0)
            throw divergence_error("gauss_2f1: diverges as z -> 1 with c-a-b <= 0");
        // Gauss summation; the series converges too slowly this close to 1.
        if (!(c - a > 0.0))
            throw std::domain_error("gauss_2f1: requires c > a at z = 1");
        return std::exp(ln_gamma(c) + ln_gamma(c - a - b) - ln_gamma(c - a) -
                        ln_gamma(c - b));
    }
    double term = 1.0, sum = 1.0;
    const long kmax = 20'000'000;
    for (long k = 0; k < kmax; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * z;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum) && k > 4)
            return sum;
    }
    throw accuracy_error("gauss_2f1: series did not converge");
}

// Complete elliptic integral of the first kind, modulus convention:
// K(k) = int_0^{pi/2} (1 - k^2 sin^2 t)^{-1/2} dt.
// Arguments within 1e-12 of 1 are reported as the divergent value.
inline ExtendedReal elliptic_k(double k) {
    if (!(k >= 0.0) || !(k <= 1.0))
        throw std::domain_error("elliptic_k: requires 0 <= k <= 1");
    if (k >= 1.0 - 1e-12)
        return ExtendedReal::infinity();
    double a = 1.0, b = std::sqrt((1.0 - k) * (1.0 + k));
    // quadratic convergence: 40 iterations are far more than double precision
    // needs, and the iteration cap avoids stalling on the last ulp
    for (int it = 0; it < 40 && std::abs(a - b) > 4e-16 * a; ++it) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return ExtendedReal::finite(std::numbers::pi / (2.0 * a));
}

// Surface area of the unit d-sphere embedded in R^{d+1}: 2 pi^{(d+1)/2} / Gamma((d+1)/2).
inline double sphere_area(int d) {
    if (d < 0)
        throw std::domain_error("sphere_area: requires d >= 0");
    const double h = (d + 1) / 2.0;
    return 2.0 * std::exp(h * std::log(std::numbers::pi) - ln_gamma(h));
}

} // namespace hyperconv
