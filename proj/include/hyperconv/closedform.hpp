#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hyperconv/extended_real.hpp"
#include "hyperconv/forms.hpp"
#include "hyperconv/quadrature.hpp"
#include "hyperconv/specialfun.hpp"

// Exact 1-D reductions: Lambda_2 through the elliptic integral, the Theta
// families through the reduced Beta-type integral, and the Gamma-ratio
// constants of the reduction chain. Constants are assembled in log space.

namespace hyperconv {

// beta(w) = 4|w|^2/(1+|w|^2)^2, the parameter of every reduced integral.
inline double beta_of(double w_norm) {
    const double w2 = w_norm * w_norm;
    return 4.0 * w2 / ((1.0 + w2) * (1.0 + w2));
}

// Lambda_2(w) = 2|w|^2/(1+|w|^2) * K(sqrt(beta)); infinite exactly on |w| = 1.
inline ExtendedReal lambda2_exact(double w_norm) {
    if (!(w_norm >= 0.0))
        throw std::domain_error("lambda2_exact: |w| must be nonnegative");
    const double w2 = w_norm * w_norm;
    const double beta = beta_of(w_norm);
    auto K = elliptic_k(std::sqrt(beta));
    if (K.is_infinite())
        return ExtendedReal::infinity();
    return ExtendedReal::finite(2.0 * w2 / (1.0 + w2) * K.value());
}

// Log blow-up model near the unit sphere: -ln(sqrt(1-beta)/2).
inline double lambda2_log_asymptote(double w_norm) {
    const double beta = beta_of(w_norm);
    if (!(beta > 0.9))
        throw std::domain_error("lambda2_log_asymptote: asymptote only claimed for beta > 0.9");
    return -std::log(std::sqrt(1.0 - beta) / 2.0);
}

namespace detail {

// 2^{a+l-n} pi^{(n-1)/2} / Gamma((n-1)/2), the shared reduction prefactor.
inline double theta_coefficient(int n, double alpha, double lambda) {
    return std::exp((alpha + lambda - n) * std::numbers::ln2 +
                    0.5 * (n - 1) * std::log(std::numbers::pi) -
                    ln_gamma((n - 1) / 2.0));
}

inline double w_factor(int n, double alpha, double lambda, double w_norm) {
    const double w2 = w_norm * w_norm;
    if (w2 == 0.0)
        return 0.0;
    return std::pow(w2 / (1.0 + w2), alpha + lambda - n + 1.0);
}

} // namespace detail

// Reduced integrand of Theta_{n,alpha,lambda}; exposed so the oracle tests
// can cross it against the Euler-integral identity.
inline ReducedIntegrand theta_reduced(int n, double alpha, double lambda,
                                      double w_norm) {
    ReducedIntegrand f;
    f.coefficient =
        detail::theta_coefficient(n, alpha, lambda) * detail::w_factor(n, alpha, lambda, w_norm);
    f.p = (alpha + lambda - n + 1.0) / 2.0;
    f.q = (n - 1.0) / 2.0;
    f.s = alpha / 2.0;
    f.beta = beta_of(w_norm);
    return f;
}

// Exact Theta_{n,alpha,lambda}(w); Theta_{n,alpha} is the lambda = alpha case.
inline ExtendedReal theta_exact(int n, double alpha, double lambda, double w_norm,
                                const QuadratureOptions& opt = {}) {
    if (n < 2)
        throw std::domain_error("theta_exact: n >= 2");
    return integrate_reduced(theta_reduced(n, alpha, lambda, w_norm), opt);
}

enum class BoundDenominator {
    GammaLambdaHalf, // Beta-integral evaluation of the relaxed integrand
    GammaAlphaHalf,  // alternate reading; identical when lambda = alpha
};

struct BoundReport {
    ExtendedReal exact_value = ExtendedReal::finite(0);
    ExtendedReal upper_bound = ExtendedReal::finite(0);
    double w_factor = 0; // [|w|^2/(1+|w|^2)]^{alpha+lambda-n+1}
    double constant = 0; // the Gamma-ratio constant
};

// Uniform bound: constant * w_factor with
// constant = 2^{a+l-n} pi^{(n-1)/2} Gamma((a+l-n+1)/2) Gamma((n-1-a)/2)
//            / (Gamma((n-1)/2) Gamma(l/2)).
// The Gamma(l/2) denominator is the one the relaxed Beta integral
// B((a+l-n+1)/2, (n-1-a)/2) actually produces; Gamma(a/2) is selectable
// for comparison and agrees whenever l = a.
inline BoundReport theta_bound(int n, double alpha, double lambda, double w_norm,
                               BoundDenominator denom = BoundDenominator::GammaLambdaHalf) {
    const double p = (alpha + lambda - n + 1.0) / 2.0;
    const double q_relaxed = (n - 1.0 - alpha) / 2.0;
    if (!(p > 0.0) || !(q_relaxed > 0.0))
        throw std::domain_error("theta_bound: parameters outside the bounded window");
    const double dh = denom == BoundDenominator::GammaLambdaHalf ? lambda / 2.0 : alpha / 2.0;
    const double constant =
        std::exp((alpha + lambda - n) * std::numbers::ln2 +
                 0.5 * (n - 1) * std::log(std::numbers::pi) + ln_gamma(p) +
                 ln_gamma(q_relaxed) - ln_gamma((n - 1) / 2.0) - ln_gamma(dh));
    BoundReport r;
    r.w_factor = detail::w_factor(n, alpha, lambda, w_norm);
    r.constant = constant;
    r.upper_bound = ExtendedReal::finite(constant * r.w_factor);
    r.exact_value = theta_exact(n, alpha, lambda, w_norm);
    return r;
}

// Fourier multiplier of the Riesz potential |x|^{-lambda} on R^n.
inline double riesz_ft_constant(int n, double lambda) {
    if (!(lambda > 0.0) || !(lambda < n))
        throw std::domain_error("riesz_ft_constant: requires 0 < lambda < n");
    return std::exp((lambda - n / 2.0) * std::log(std::numbers::pi) +
                    ln_gamma((n - lambda) / 2.0) - ln_gamma(lambda / 2.0));
}

// Constant value of |w|^2 int prod_{k<=n-3} |x_k|^{-(n-1)} |w - sum x_k|^{-(n-1)} dx:
// pi^{[(n-1)^2-3]/2} Gamma((n-1)/2)^{-(n-2)} Gamma(n/2-1)^{-1}.
inline double riesz_chain_constant(int n) {
    if (n < 4)
        throw std::domain_error("riesz_chain_constant: requires n >= 4");
    return std::exp(0.5 * ((n - 1.0) * (n - 1.0) - 3.0) * std::log(std::numbers::pi) -
                    (n - 2.0) * ln_gamma((n - 1) / 2.0) - ln_gamma(n / 2.0 - 1.0));
}

// (1/8) [sigma(S^{n-2})]^2, the Delta_n -> Delta_2 reduction constant.
inline double delta_n_reduction_constant(int n) {
    if (n <= 2)
        throw std::domain_error("delta_n_reduction_constant: requires n > 2");
    const double s = sphere_area(n - 2);
    return 0.125 * s * s;
}

} // namespace hyperconv
