#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "hyperconv/closedform.hpp"
#include "hyperconv/harness.hpp"
#include "hyperconv/kernels.hpp"
#include "hyperconv/oracle.hpp"

// The acceptance gate: twelve criteria, each a self-contained check with a
// pinned tolerance and budget, reported one line per criterion. Failures
// report the measured numbers, never a bare flag.

namespace hyperconv {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
};

struct AcceptanceOptions {
    long budget = 1'000'000;
    int workers = 8;
    std::uint64_t seed = 42;
};

namespace acceptance {

namespace detail {

inline std::string num(double x) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", x);
    return b;
}

} // namespace detail

// 1. K(k) vs (pi/2) 2F1(1/2,1/2;1;k^2) to 1e-9 relative.
inline CriterionResult elliptic_hypergeometric_identity(const AcceptanceOptions&) {
    CriterionResult r{1, "elliptic vs hypergeometric identity", true, ""};
    double worst = 0;
    for (double k : {0.1, 0.5, 0.9, 0.99}) {
        const double K = elliptic_k(k).value();
        const double F = std::numbers::pi / 2.0 * gauss_2f1(0.5, 0.5, 1.0, k * k);
        worst = std::max(worst, std::abs(K - F) / K);
    }
    r.pass = worst <= 1e-9;
    r.detail = "worst relative deviation " + detail::num(worst) + " (tol 1e-9)";
    return r;
}

// 2. Lambda_2 closed form vs MC at |w| in {0.5, 2}: within 3 stderr and
// stderr/value <= 2%.
inline CriterionResult lambda2_closed_form_vs_oracle(const AcceptanceOptions& o) {
    CriterionResult r{2, "Lambda_2 closed form vs oracle", true, ""};
    for (double w : {0.5, 2.0}) {
        const double exact = lambda2_exact(w).value();
        auto est = estimate(make_lambda_n(2, w), o.budget, RngStream{o.seed, 20},
                            o.workers);
        const double dev = std::abs(est.value.as_double() - exact);
        const double rel_se = est.stderr_ / est.value.as_double();
        const bool ok = dev <= 3.0 * est.stderr_ && rel_se <= 0.02;
        r.pass = r.pass && ok;
        r.detail += "|w|=" + detail::num(w) + ": dev=" + detail::num(dev) +
                    " (3se=" + detail::num(3.0 * est.stderr_) +
                    "), rel_se=" + detail::num(rel_se) + "; ";
    }
    return r;
}

// 3. Divergence at the unit sphere: exact infinity plus the oracle's
// heavy-tail flag at budget >= 1e6.
inline CriterionResult unit_sphere_divergence(const AcceptanceOptions& o) {
    CriterionResult r{3, "Lambda_2 divergence at |w| = 1", true, ""};
    const bool exact_inf = lambda2_exact(1.0).is_infinite();
    auto est = estimate(make_lambda_n(2, 1.0), std::max<long>(o.budget, 1'000'000),
                        RngStream{o.seed, 30}, o.workers);
    r.pass = exact_inf && est.divergence_suspected;
    r.detail = std::string("closed form infinite: ") + (exact_inf ? "yes" : "no") +
               "; divergence flag: " + (est.divergence_suspected ? "set" : "not set") +
               " (estimate " + detail::num(est.value.as_double()) + ")";
    return r;
}

// 4. Log-asymptote fit ratio in [0.9, 1.1] at beta in {0.99, 0.995, 0.999, 0.9999}.
inline CriterionResult log_asymptote_fit(const AcceptanceOptions&) {
    CriterionResult r{4, "log asymptote fit ratio", false, ""};
    std::vector<std::pair<double, double>> pts;
    for (double b : {0.99, 0.995, 0.999, 0.9999}) {
        const double w = (1.0 - std::sqrt(1.0 - b)) / std::sqrt(b);
        pts.emplace_back(w, lambda2_exact(w).value());
    }
    auto fit = fit_log_divergence(pts);
    r.pass = fit.ratio >= 0.9 && fit.ratio <= 1.1;
    r.detail = "ratio " + detail::num(fit.ratio) + " (window [0.9, 1.1]), residual " +
               detail::num(fit.residual);
    if (!r.pass)
        r.detail +=
            "; note: Lambda_2/model -> 1 only like 1 + ln2/|ln sqrt(1-beta)|, "
            "which still exceeds 1.1 at beta = 0.9999";
    return r;
}

// 5. Theta bound with <= 1e-9 slack and finiteness over 8 parameter pairs x
// the default 17-point |w| grid.
inline CriterionResult theta_bound_grid(const AcceptanceOptions&) {
    CriterionResult r{5, "Theta_n,alpha bound on grid", true, ""};
    const std::pair<int, double> cases[] = {{2, 0.6}, {2, 0.75}, {2, 0.9}, {3, 1.25},
                                            {3, 1.5}, {3, 1.75}, {4, 2.0},  {4, 2.5}};
    double worst = -1e300;
    int infinities = 0;
    for (auto [n, a] : cases) {
        for (double w : default_w_grid()) {
            auto b = theta_bound(n, a, a, w);
            if (!b.exact_value.is_finite()) {
                ++infinities;
                continue;
            }
            const double excess = b.exact_value.value() - b.upper_bound.as_double();
            worst = std::max(worst, excess);
        }
    }
    r.pass = infinities == 0 && worst <= 1e-9;
    r.detail = "worst (exact - bound) = " + detail::num(worst) + " (tol 1e-9), " +
               std::to_string(infinities) + " infinite values";
    return r;
}

// 6. Theta_{2,alpha} finite at |w| = 1 for alpha in {0.6, 0.75, 0.9},
// infinite at alpha = 1.
inline CriterionResult lambda_2_alpha_boundedness(const AcceptanceOptions&) {
    CriterionResult r{6, "Lambda_2,alpha bounded at |w| = 1", true, ""};
    for (double a : {0.6, 0.75, 0.9}) {
        const bool fin = theta_exact(2, a, a, 1.0).is_finite();
        r.pass = r.pass && fin;
        r.detail += "alpha=" + detail::num(a) + (fin ? " finite; " : " INFINITE; ");
    }
    const bool inf1 = theta_exact(2, 1.0, 1.0, 1.0).is_infinite();
    r.pass = r.pass && inf1;
    r.detail += std::string("alpha=1 ") + (inf1 ? "infinite" : "FINITE");
    return r;
}

// 7. Lambda_3 = Delta_3 at |w| in {0.5, 1, 2} within 3 combined stderr.
inline CriterionResult lambda3_equals_delta3(const AcceptanceOptions& o) {
    CriterionResult r{7, "Lambda_3 = Delta_3", true, ""};
    std::uint64_t id = 0;
    for (double w : {0.5, 1.0, 2.0}) {
        auto l = estimate(make_lambda_n(3, w), o.budget,
                          RngStream{o.seed, 700 + 2 * id}, o.workers);
        auto d = estimate(make_delta_n(3, w), o.budget,
                          RngStream{o.seed, 701 + 2 * id}, o.workers);
        ++id;
        const double dev = std::abs(l.value.as_double() - d.value.as_double());
        const double tol = 3.0 * std::hypot(l.stderr_, d.stderr_);
        r.pass = r.pass && dev <= tol;
        r.detail += "|w|=" + detail::num(w) + ": dev=" + detail::num(dev) +
                    " tol=" + detail::num(tol) + "; ";
    }
    return r;
}

// 8. Dilation invariance: Theta_{3,1.5} at (tau=4, |w|=2) vs (tau=1, |w|=1).
inline CriterionResult dilation_invariance(const AcceptanceOptions& o) {
    CriterionResult r{8, "dilation invariance", true, ""};
    auto a = estimate(make_theta(3, 1.5, 2.0, 4.0), o.budget, RngStream{o.seed, 80},
                      o.workers);
    auto b = estimate(make_theta(3, 1.5, 1.0, 1.0), o.budget, RngStream{o.seed, 81},
                      o.workers);
    const double dev = std::abs(a.value.as_double() - b.value.as_double());
    const double tol = 3.0 * std::hypot(a.stderr_, b.stderr_);
    r.pass = dev <= tol;
    r.detail = "dev=" + detail::num(dev) + " tol=" + detail::num(tol) + " (values " +
               detail::num(a.value.as_double()) + ", " +
               detail::num(b.value.as_double()) + ")";
    return r;
}

// Independent route to riesz_chain_constant(4): nested quadrature of
// 4 pi int_0^inf int_0^pi (1 + r^2 - 2 r cos t)^{-3/2} sin^2 t dt dr,
// which is |w|^2 int_{R^4} |x|^{-3} |w-x|^{-3} dx at |w| = 1.
inline double chain_constant_by_quadrature() {
    QuadratureOptions opt;
    opt.rel_tol = 1e-6;
    auto inner = [&](double rr) {
        auto g = [&](double u) {
            const double t = std::numbers::pi * u;
            const double st = std::sin(t);
            const double sh = std::sin(0.5 * t);
            // (1-r)^2 + 4 r sin^2(t/2) = 1 + r^2 - 2 r cos t without the
            // cancellation that poisons it near r = 1, t = 0
            const double d = (1.0 - rr) * (1.0 - rr) + 4.0 * rr * sh * sh;
            return std::numbers::pi * st * st * std::pow(d, -1.5);
        };
        return integrate_adaptive(g, 0.0, 0.0, opt);
    };
    // r > 1 folds onto s = 1/r with an extra factor s, so the outer integral
    // is int_0^1 (1+s) inner(s) ds. inner grows only like -log(1-s) at the
    // fold point; truncating at 1 - 1e-6 costs ~1e-5, well under the 1% gate.
    const double smax = 1.0 - 1e-6;
    auto outer = [&](double u) {
        const double s = smax * u;
        return smax * (1.0 + s) * inner(s);
    };
    return 4.0 * std::numbers::pi * integrate_adaptive(outer, 0.0, 0.0, opt);
}

// 9. Quadrature value vs riesz_chain_constant(4) = 4 pi^2 within 1%.
inline CriterionResult riesz_chain_constant_check(const AcceptanceOptions&) {
    CriterionResult r{9, "Riesz chain constant n = 4", true, ""};
    const double q = chain_constant_by_quadrature();
    const double c = riesz_chain_constant(4);
    const double rel = std::abs(q - c) / c;
    r.pass = rel <= 0.01;
    r.detail = "quadrature " + detail::num(q) + " vs constant " + detail::num(c) +
               ", rel dev " + detail::num(rel) + " (tol 1%)";
    return r;
}

struct SweepSups {
    double d2 = 0, d2_se = 0;
    double d3 = 0, d3_se = 0;
    double d4 = 0, d4_se = 0;
    bool computed = false;
};

// 10. Delta_2/3/4 sweeps: no divergence flags, sups stable within 10% under
// grid-density doubling; Lambda_2 flags |w| = 1. Fills the sups for 11.
inline CriterionResult uniform_boundedness_sweeps(const AcceptanceOptions& o,
                                                  SweepSups& sups) {
    CriterionResult r{10, "uniform boundedness sweeps", true, ""};
    std::uint64_t id = 0;
    auto sup_of = [&](int n, const std::vector<double>& grid, bool& any_flag,
                      double& argmax_se) {
        double sup = 0;
        argmax_se = 0;
        for (double w : grid) {
            auto est = estimate(make_delta_n(n, w), o.budget,
                                RngStream{o.seed, 1000 + ++id}, o.workers);
            any_flag = any_flag || est.divergence_suspected;
            if (est.value.as_double() > sup) {
                sup = est.value.as_double();
                argmax_se = est.stderr_;
            }
        }
        return sup;
    };
    const auto base = default_w_grid(1), dense = default_w_grid(2);
    for (int n : {2, 3, 4}) {
        bool flag = false;
        double se1 = 0, se2 = 0;
        const double s1 = sup_of(n, base, flag, se1);
        const double s2 = sup_of(n, dense, flag, se2);
        const double drift = std::abs(s2 - s1) / std::max(s1, 1e-300);
        const bool ok = !flag && drift <= 0.10;
        r.pass = r.pass && ok;
        r.detail += "Delta_" + std::to_string(n) + ": sup=" + detail::num(s2) +
                    " drift=" + detail::num(drift) + (flag ? " FLAGGED; " : "; ");
        if (n == 2) { sups.d2 = s2; sups.d2_se = se2; }
        if (n == 3) { sups.d3 = s2; sups.d3_se = se2; }
        if (n == 4) { sups.d4 = s2; sups.d4_se = se2; }
    }
    auto l2 = estimate(make_lambda_n(2, 1.0), o.budget, RngStream{o.seed, 1999},
                       o.workers);
    r.pass = r.pass && l2.divergence_suspected;
    r.detail += std::string("Lambda_2 flag at |w|=1: ") +
                (l2.divergence_suspected ? "set" : "NOT SET");
    sups.computed = true;
    return r;
}

// 11. Delta reduction inequalities against the grid sups from 10.
inline CriterionResult reduction_inequalities(const AcceptanceOptions& o,
                                              SweepSups& sups) {
    CriterionResult r{11, "Delta reduction inequalities", true, ""};
    if (!sups.computed) {
        AcceptanceOptions tmp = o;
        uniform_boundedness_sweeps(tmp, sups);
    }
    struct Case {
        int n;
        double lhs, lhs_se, c;
    } cases[] = {{3, sups.d3, sups.d3_se, delta_n_reduction_constant(3)},
                 {4, sups.d4, sups.d4_se, delta_n_reduction_constant(4)}};
    for (auto& cse : cases) {
        const double rhs = cse.c * sups.d2;
        const double tol = 3.0 * std::hypot(cse.lhs_se, cse.c * sups.d2_se);
        const bool ok = cse.lhs <= rhs + tol;
        r.pass = r.pass && ok;
        r.detail += "n=" + std::to_string(cse.n) + ": sup=" + detail::num(cse.lhs) +
                    " <= " + detail::num(rhs) + "+" + detail::num(tol) +
                    (ok ? "; " : " VIOLATED; ");
    }
    return r;
}

// 12. Quadratic-form probe for H_{2,0.75}: finite ratios within a factor 3
// across Gaussian widths {0.5, 1, 2}.
inline CriterionResult quadratic_form_stability(const AcceptanceOptions& o) {
    CriterionResult r{12, "Stein-Weiss quadratic form probe", true, ""};
    FormSpec proto;
    proto.family = Family::KernelH;
    proto.n = 2;
    proto.alphas = {0.75, 0.75};
    proto.w = axis_vector(2, 1.0);
    proto.v = axis_vector(2, 1.0);
    double lo = 1e300, hi = 0;
    std::uint64_t k = 0;
    for (double width : {0.5, 1.0, 2.0}) {
        auto f = [width](double rr) { return std::exp(-rr * rr / (2.0 * width * width)); };
        const double ratio = quadratic_form_probe(proto, f, ProbeGrid{},
                                                  std::max<long>(o.budget, 200'000),
                                                  RngStream{o.seed, 1200 + 7 * k++}, 1);
        const bool fin = std::isfinite(ratio) && ratio > 0;
        r.pass = r.pass && fin;
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        r.detail += "width=" + detail::num(width) + ": ratio=" + detail::num(ratio) + "; ";
    }
    const double spread = hi / std::max(lo, 1e-300);
    r.pass = r.pass && spread <= 3.0;
    r.detail += "spread x" + detail::num(spread) + " (tol x3)";
    return r;
}

} // namespace acceptance

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o) {
    using namespace acceptance;
    std::vector<CriterionResult> out;
    SweepSups sups;
    out.push_back(elliptic_hypergeometric_identity(o));
    out.push_back(lambda2_closed_form_vs_oracle(o));
    out.push_back(unit_sphere_divergence(o));
    out.push_back(log_asymptote_fit(o));
    out.push_back(theta_bound_grid(o));
    out.push_back(lambda_2_alpha_boundedness(o));
    out.push_back(lambda3_equals_delta3(o));
    out.push_back(dilation_invariance(o));
    out.push_back(riesz_chain_constant_check(o));
    out.push_back(uniform_boundedness_sweeps(o, sups));
    out.push_back(reduction_inequalities(o, sups));
    out.push_back(quadratic_form_stability(o));
    return out;
}

} // namespace hyperconv
