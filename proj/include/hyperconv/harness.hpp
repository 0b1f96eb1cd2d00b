#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyperconv/closedform.hpp"
#include "hyperconv/forms.hpp"
#include "hyperconv/oracle.hpp"

// Sweep engine: grids over (n, exponents, |w|), closed-form/oracle
// comparison, bound checks, divergence-rate fits, reduction-chain
// inequalities; reports persist as CSV + JSON + manifest and are
// byte-reproducible for a fixed (seed, workers, budget).

namespace hyperconv {

inline constexpr const char* version_string = "0.1.0";

enum class Check {
    CompareClosedForm,
    BoundInequality,
    DilationInvariance,
    RotationInvariance,
    LogAsymptote,
    ReductionInequality,
    SupFinite,
};

inline const char* check_name(Check c) {
    switch (c) {
        case Check::CompareClosedForm: return "compare_closed_form";
        case Check::BoundInequality: return "bound_inequality";
        case Check::DilationInvariance: return "dilation_invariance";
        case Check::RotationInvariance: return "rotation_invariance";
        case Check::LogAsymptote: return "log_asymptote";
        case Check::ReductionInequality: return "reduction_inequality";
        case Check::SupFinite: return "sup_finite";
    }
    return "?";
}

// Log-spaced default |w| grid 2^{k/4}, k = -8..8; contains the critical
// point 1.0 exactly (k = 0).
inline std::vector<double> default_w_grid(int density = 1) {
    std::vector<double> g;
    for (int k = -8 * density; k <= 8 * density; ++k)
        g.push_back(std::pow(2.0, k / (4.0 * density)));
    return g;
}

struct SweepSpec {
    Family family = Family::ThetaAlpha;
    std::vector<int> ns = {2};
    std::vector<double> alphas = {0.75}; // ignored by LambdaN / DeltaN
    std::vector<double> lambdas = {};    // ThetaAlphaLambda / LambdaAlphaLambda only
    std::vector<double> w_norms = default_w_grid();
    long budget = 100000;
    std::uint64_t seed = 42;
    int workers = 1;
    std::vector<Check> checks = {Check::CompareClosedForm, Check::BoundInequality};

    bool has(Check c) const {
        return std::find(checks.begin(), checks.end(), c) != checks.end();
    }
};

struct SweepRow {
    std::string family;
    int n = 0;
    double alpha = 0, lambda = 0, tau = 1, w_norm = 0;
    std::optional<ExtendedReal> exact;
    std::optional<ExtendedReal> bound;
    std::optional<double> mc_value;
    double mc_stderr = 0;
    long n_samples = 0;
    std::string check;
    bool pass = true;
    double slack = 0; // signed margin; >= 0 iff pass (except flag-only checks)
    bool divergence_suspected = false;
};

struct SweepReport {
    std::vector<SweepRow> rows;
    double grid_sup = 0; // lower bound on the true sup (finite grid)
    std::string sup_note = "sup over finite grid: a lower bound, not a confirmation";
    int failed_checks = 0;
    std::uint64_t seed = 42;
    long budget = 0;
    int workers = 1;
    std::string version = version_string;
};

struct FitResult {
    double ratio = 0;
    double residual = 0;
};

// Least-squares multiplicative fit of Lambda_2 values against the model
// -ln(sqrt(1-beta)/2) (through the origin).
inline FitResult fit_log_divergence(const std::vector<std::pair<double, double>>& pts) {
    if (pts.size() < 4)
        throw std::invalid_argument("fit_log_divergence: need at least 4 points");
    double sm2 = 0, svm = 0, sv2 = 0;
    std::vector<double> model(pts.size());
    for (size_t i = 0; i < pts.size(); ++i) {
        const double w = pts[i].first, v = pts[i].second;
        if (!(w > 0.9) || !(w < 1.0) || !std::isfinite(v))
            throw std::invalid_argument("fit_log_divergence: points must be finite with |w| in (0.9, 1)");
        const double m = -std::log(std::sqrt(1.0 - beta_of(w)) / 2.0);
        model[i] = m;
        sm2 += m * m;
        svm += v * m;
        sv2 += v * v;
    }
    FitResult r;
    if (sm2 <= 0.0) {
        r.residual = 1.0;
        return r;
    }
    r.ratio = svm / sm2;
    double se = 0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const double e = pts[i].second - r.ratio * model[i];
        se += e * e;
    }
    r.residual = std::sqrt(se / std::max(sv2, 1e-300));
    return r;
}

namespace detail {

inline FormSpec sweep_point(Family fam, int n, double alpha, double lambda,
                            double w) {
    switch (fam) {
        case Family::LambdaN: return make_lambda_n(n, w);
        case Family::DeltaN: return make_delta_n(n, w);
        case Family::ThetaAlpha: return make_theta(n, alpha, w);
        case Family::ThetaAlphaLambda: return make_theta_lambda(n, alpha, lambda, w);
        case Family::LambdaNAlpha: return make_lambda_n_alpha(n, alpha, w);
        case Family::LambdaAlphaLambda:
            return make_lambda_alpha_lambda(n, std::vector<double>(n - 1, alpha),
                                            lambda, w);
        default:
            throw std::invalid_argument("run_sweep: kernel families are probed, not swept");
    }
}

inline std::optional<ExtendedReal> closed_form(const FormSpec& s) {
    switch (s.family) {
        case Family::LambdaN:
            if (s.n == 2)
                return lambda2_exact(s.w_norm());
            return std::nullopt;
        case Family::ThetaAlpha:
            return theta_exact(s.n, s.alphas[0], s.alphas[0], s.w_norm());
        case Family::ThetaAlphaLambda:
            return theta_exact(s.n, s.alphas[0], s.alphas[1], s.w_norm());
        default:
            return std::nullopt;
    }
}

inline std::optional<ExtendedReal> closed_bound(const FormSpec& s) {
    if (s.family != Family::ThetaAlpha && s.family != Family::ThetaAlphaLambda)
        return std::nullopt;
    const double a = s.alphas[0];
    const double l = s.family == Family::ThetaAlpha ? a : s.alphas[1];
    try {
        return theta_bound(s.n, a, l, s.w_norm()).upper_bound;
    } catch (const std::domain_error&) {
        return std::nullopt; // outside the bounded window
    }
}

inline SweepRow base_row(const FormSpec& s, double alpha, double lambda) {
    SweepRow r;
    r.family = family_name(s.family);
    r.n = s.n;
    r.alpha = alpha;
    r.lambda = lambda;
    r.tau = s.tau;
    r.w_norm = s.w_norm();
    return r;
}

// Representative magnitude of a point: closed form when finite, else MC.
inline double magnitude(const std::optional<ExtendedReal>& exact,
                        const std::optional<double>& mc) {
    if (exact && exact->is_finite())
        return exact->value();
    if (mc)
        return *mc;
    return 0.0;
}

} // namespace detail

inline SweepReport run_sweep(const SweepSpec& spec) {
    if (spec.ns.empty() || spec.alphas.empty() || spec.w_norms.empty())
        throw std::invalid_argument("run_sweep: empty grid");
    if (spec.budget <= 0)
        throw std::invalid_argument("run_sweep: budget must be positive");
    std::vector<double> lambdas = spec.lambdas.empty() ? std::vector<double>{0.0}
                                                       : spec.lambdas;
    const bool needs_mc = spec.has(Check::CompareClosedForm) ||
                          spec.has(Check::DilationInvariance) ||
                          spec.has(Check::RotationInvariance) ||
                          spec.has(Check::SupFinite);

    SweepReport rep;
    rep.seed = spec.seed;
    rep.budget = spec.budget;
    rep.workers = spec.workers;

    std::uint64_t point_id = 0;
    auto eval_point = [&](const FormSpec& fs, double alpha, double lambda,
                          std::optional<double>& mc_out, bool& flag_out) {
        // one row per requested per-point check; returns rows
        std::vector<SweepRow> rows;
        const auto exact = detail::closed_form(fs);
        const auto bound = detail::closed_bound(fs);
        std::optional<McEstimate> mc;
        if (needs_mc) {
            mc = estimate(fs, spec.budget, RngStream{spec.seed, 0x100 * ++point_id},
                          spec.workers);
            mc_out = mc->value.as_double();
            flag_out = mc->divergence_suspected;
        }
        auto fill = [&](Check c) {
            SweepRow r = detail::base_row(fs, alpha, lambda);
            r.exact = exact;
            r.bound = bound;
            if (mc) {
                r.mc_value = mc->value.as_double();
                r.mc_stderr = mc->stderr_;
                r.n_samples = mc->n_samples;
                r.divergence_suspected = mc->divergence_suspected;
            }
            r.check = check_name(c);
            return r;
        };
        if (spec.has(Check::CompareClosedForm) && exact && mc) {
            SweepRow r = fill(Check::CompareClosedForm);
            if (exact->is_finite()) {
                // floor at the closed form's own accuracy contract, so a
                // zero-variance estimate doesn't demand exact-arithmetic match
                const double tol = 3.0 * mc->stderr_ + 1e-7 * std::abs(exact->value());
                r.slack = tol - std::abs(mc->value.as_double() - exact->value());
                r.pass = r.slack >= 0.0;
            } else {
                // closed form diverges: the oracle must at least flag it
                r.pass = mc->divergence_suspected;
                r.slack = r.pass ? 0.0 : -1.0;
            }
            rows.push_back(r);
        }
        if (spec.has(Check::BoundInequality) && exact && bound) {
            SweepRow r = fill(Check::BoundInequality);
            if (!bound->is_finite()) {
                r.pass = true;
                r.slack = 0.0;
            } else if (!exact->is_finite()) {
                r.pass = false;
                r.slack = -1.0;
            } else {
                r.slack = bound->value() - exact->value() +
                          1e-9 * std::max(1.0, bound->value());
                r.pass = r.slack >= 0.0;
            }
            rows.push_back(r);
        }
        if (spec.has(Check::DilationInvariance) && mc) {
            FormSpec scaled = fs;
            scaled.tau *= 4.0;
            for (auto& c : scaled.w) c *= 2.0;
            auto mc2 = estimate(scaled, spec.budget,
                                RngStream{spec.seed, 0x100 * point_id + 1},
                                spec.workers);
            SweepRow r = fill(Check::DilationInvariance);
            const double tol = 3.0 * std::hypot(mc->stderr_, mc2.stderr_);
            r.slack = tol - std::abs(mc->value.as_double() - mc2.value.as_double());
            r.pass = r.slack >= 0.0;
            rows.push_back(r);
        }
        if (spec.has(Check::RotationInvariance) && mc) {
            FormSpec rot = fs;
            const double wn = fs.w_norm(), c45 = std::sqrt(0.5);
            rot.w = axis_vector(fs.n, 0.0);
            rot.w[0] = wn * c45;
            rot.w[1] = wn * c45;
            auto mc2 = estimate(rot, spec.budget,
                                RngStream{spec.seed, 0x100 * point_id + 2},
                                spec.workers);
            SweepRow r = fill(Check::RotationInvariance);
            const double tol = 3.0 * std::hypot(mc->stderr_, mc2.stderr_);
            r.slack = tol - std::abs(mc->value.as_double() - mc2.value.as_double());
            r.pass = r.slack >= 0.0;
            rows.push_back(r);
        }
        return rows;
    };

    for (int n : spec.ns) {
        for (double alpha : spec.alphas) {
            for (double lambda : lambdas) {
                // base pass over the |w| grid
                std::vector<std::optional<double>> mcs(spec.w_norms.size());
                std::vector<bool> flags(spec.w_norms.size(), false);
                std::vector<std::optional<ExtendedReal>> exacts(spec.w_norms.size());
                for (size_t i = 0; i < spec.w_norms.size(); ++i) {
                    FormSpec fs = detail::sweep_point(spec.family, n, alpha, lambda,
                                                      spec.w_norms[i]);
                    exacts[i] = detail::closed_form(fs);
                    bool flag = false;
                    auto rows = eval_point(fs, alpha, lambda, mcs[i], flag);
                    flags[i] = flag;
                    for (auto& r : rows) rep.rows.push_back(std::move(r));
                }
                // grid sup and SupFinite refinement
                size_t argmax = 0;
                double sup = -1;
                bool any_infinite = false, any_flag = false;
                for (size_t i = 0; i < spec.w_norms.size(); ++i) {
                    if (exacts[i] && !exacts[i]->is_finite())
                        any_infinite = true;
                    if (flags[i])
                        any_flag = true;
                    const double m = detail::magnitude(exacts[i], mcs[i]);
                    if (m > sup) {
                        sup = m;
                        argmax = i;
                    }
                }
                rep.grid_sup = std::max(rep.grid_sup, sup);
                if (spec.has(Check::SupFinite)) {
                    // double the grid density around the argmax and require a
                    // stable sup plus no divergence indications anywhere
                    double sup2 = sup;
                    bool ref_flag = false;
                    for (int side = -1; side <= 1; side += 2) {
                        const size_t j = argmax + side;
                        if (side < 0 && argmax == 0)
                            continue;
                        if (j >= spec.w_norms.size())
                            continue;
                        const double wm =
                            std::sqrt(spec.w_norms[argmax] * spec.w_norms[j]);
                        FormSpec fs =
                            detail::sweep_point(spec.family, n, alpha, lambda, wm);
                        auto ex = detail::closed_form(fs);
                        std::optional<double> mcv;
                        if (needs_mc) {
                            auto est = estimate(fs, spec.budget,
                                                RngStream{spec.seed, 0x100 * ++point_id},
                                                spec.workers);
                            mcv = est.value.as_double();
                            ref_flag = ref_flag || est.divergence_suspected;
                        }
                        if (ex && !ex->is_finite())
                            any_infinite = true;
                        sup2 = std::max(sup2, detail::magnitude(ex, mcv));
                    }
                    SweepRow r;
                    r.family = family_name(spec.family);
                    r.n = n;
                    r.alpha = alpha;
                    r.lambda = lambda;
                    r.w_norm = spec.w_norms[argmax];
                    r.check = check_name(Check::SupFinite);
                    r.mc_value = sup2;
                    r.divergence_suspected = any_flag || ref_flag;
                    r.slack = 0.1 * std::abs(sup) - std::abs(sup2 - sup);
                    r.pass = !any_infinite && !any_flag && !ref_flag && r.slack >= 0.0;
                    rep.rows.push_back(r);
                }
                if (spec.has(Check::LogAsymptote) && spec.family == Family::LambdaN &&
                    n == 2) {
                    std::vector<std::pair<double, double>> pts;
                    for (double b : {0.99, 0.995, 0.999, 0.9999}) {
                        const double w = (1.0 - std::sqrt(1.0 - b)) / std::sqrt(b);
                        pts.emplace_back(w, lambda2_exact(w).value());
                    }
                    auto fit = fit_log_divergence(pts);
                    SweepRow r;
                    r.family = family_name(spec.family);
                    r.n = n;
                    r.check = check_name(Check::LogAsymptote);
                    r.mc_value = fit.ratio;
                    r.mc_stderr = fit.residual;
                    r.slack = std::min(fit.ratio - 0.9, 1.1 - fit.ratio);
                    r.pass = r.slack >= 0.0;
                    rep.rows.push_back(r);
                }
            }
        }
    }
    if (rep.rows.empty())
        throw std::invalid_argument("run_sweep: no rows produced (check closed-form availability)");
    for (auto& r : rep.rows)
        if (!r.pass)
            ++rep.failed_checks;
    return rep;
}

// Reduction chain on a grid: n=3 checks Lambda_3 = Delta_3
// pointwise; n>=4 checks sup Lambda_n <= chain_const(n) * sup Delta_n; all n
// check sup Delta_n <= (1/8) sigma(S^{n-2})^2 * sup Delta_2.
inline std::vector<SweepRow> check_reduction_chain(int n,
                                                   const std::vector<double>& grid,
                                                   long budget, std::uint64_t seed,
                                                   int workers = 1) {
    if (n < 3 || n > 5)
        throw std::invalid_argument("check_reduction_chain: n in {3,4,5} (desk scale)");
    std::vector<SweepRow> rows;
    std::uint64_t id = 0;
    auto run = [&](const FormSpec& fs) {
        return estimate(fs, budget, RngStream{seed, 0x9100 + 16 * ++id}, workers);
    };

    double sup_ln = 0, sup_ln_se = 0, sup_dn = 0, sup_dn_se = 0;
    for (double w : grid) {
        auto ln = run(make_lambda_n(n, w));
        auto dn = run(make_delta_n(n, w));
        if (ln.value.as_double() > sup_ln) {
            sup_ln = ln.value.as_double();
            sup_ln_se = ln.stderr_;
        }
        if (dn.value.as_double() > sup_dn) {
            sup_dn = dn.value.as_double();
            sup_dn_se = dn.stderr_;
        }
        if (n == 3) {
            SweepRow r;
            r.family = "lambda_n";
            r.n = n;
            r.alpha = n - 1.0;
            r.w_norm = w;
            r.check = check_name(Check::ReductionInequality);
            r.mc_value = ln.value.as_double();
            r.mc_stderr = ln.stderr_;
            r.n_samples = ln.n_samples;
            const double tol = 3.0 * std::hypot(ln.stderr_, dn.stderr_);
            r.slack = tol - std::abs(ln.value.as_double() - dn.value.as_double());
            r.pass = r.slack >= 0.0;
            rows.push_back(r);
        }
    }
    if (n >= 4) {
        SweepRow r;
        r.family = "lambda_n";
        r.n = n;
        r.alpha = n - 1.0;
        r.check = check_name(Check::ReductionInequality);
        r.mc_value = sup_ln;
        r.mc_stderr = sup_ln_se;
        const double rhs = riesz_chain_constant(n) * sup_dn;
        r.slack = rhs + 3.0 * std::hypot(sup_ln_se, riesz_chain_constant(n) * sup_dn_se) -
                  sup_ln;
        r.pass = r.slack >= 0.0;
        rows.push_back(r);
    }
    // Delta_2 sweep for the cross-dimension comparison
    double sup_d2 = 0, sup_d2_se = 0;
    for (double w : grid) {
        auto d2 = run(make_delta_n(2, w));
        if (d2.value.as_double() > sup_d2) {
            sup_d2 = d2.value.as_double();
            sup_d2_se = d2.stderr_;
        }
    }
    {
        SweepRow r;
        r.family = "delta_n";
        r.n = n;
        r.alpha = n - 1.0;
        r.check = check_name(Check::ReductionInequality);
        r.mc_value = sup_dn;
        r.mc_stderr = sup_dn_se;
        const double c = delta_n_reduction_constant(n);
        r.slack = c * sup_d2 + 3.0 * std::hypot(sup_dn_se, c * sup_d2_se) - sup_dn;
        r.pass = r.slack >= 0.0;
        rows.push_back(r);
    }
    return rows;
}

// ---- persistence ----

namespace detail {

inline std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_cell(const std::optional<ExtendedReal>& v) {
    if (!v)
        return "";
    return v->is_finite() ? fmt_double(v->value()) : "inf";
}

} // namespace detail

inline void write_csv(const SweepReport& rep, std::ostream& os) {
    os << "family,n,alpha,lambda,tau,w_norm,exact,bound,mc_value,mc_stderr,"
          "n_samples,check,pass,slack\n";
    for (const auto& r : rep.rows) {
        os << r.family << ',' << r.n << ',' << detail::fmt_double(r.alpha) << ','
           << detail::fmt_double(r.lambda) << ',' << detail::fmt_double(r.tau) << ','
           << detail::fmt_double(r.w_norm) << ',' << detail::csv_cell(r.exact) << ','
           << detail::csv_cell(r.bound) << ','
           << (r.mc_value ? detail::fmt_double(*r.mc_value) : std::string()) << ','
           << detail::fmt_double(r.mc_stderr) << ',' << r.n_samples << ',' << r.check
           << ',' << (r.pass ? "true" : "false") << ',' << detail::fmt_double(r.slack)
           << '\n';
    }
}

inline void to_json(nlohmann::json& j, const SweepRow& r) {
    j = nlohmann::json{
        {"family", r.family},      {"n", r.n},
        {"alpha", r.alpha},        {"lambda", r.lambda},
        {"tau", r.tau},            {"w_norm", r.w_norm},
        {"exact", r.exact ? nlohmann::json(r.exact->str()) : nlohmann::json()},
        {"bound", r.bound ? nlohmann::json(r.bound->str()) : nlohmann::json()},
        {"mc_value", r.mc_value ? nlohmann::json(*r.mc_value) : nlohmann::json()},
        {"mc_stderr", r.mc_stderr}, {"n_samples", r.n_samples},
        {"check", r.check},        {"pass", r.pass},
        {"slack", r.slack},        {"divergence_suspected", r.divergence_suspected},
    };
}

inline void to_json(nlohmann::json& j, const SweepReport& rep) {
    j = nlohmann::json{
        {"rows", rep.rows},
        {"summary",
         {{"grid_sup", rep.grid_sup},
          {"sup_note", rep.sup_note},
          {"failed_checks", rep.failed_checks},
          {"row_count", rep.rows.size()}}},
        {"provenance",
         {{"seed", rep.seed},
          {"budget", rep.budget},
          {"workers", rep.workers},
          {"version", rep.version}}},
    };
}

// Writes report.csv, report.json, and manifest.json into out_dir.
inline void write_report(const SweepReport& rep, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream csv(out_dir / "report.csv");
        write_csv(rep, csv);
    }
    {
        nlohmann::json j = rep;
        std::ofstream js(out_dir / "report.json");
        js << j.dump(2) << '\n';
    }
    {
        nlohmann::json m{{"seed", rep.seed},
                         {"budget", rep.budget},
                         {"workers", rep.workers},
                         {"version", rep.version}};
        std::ofstream ms(out_dir / "manifest.json");
        ms << m.dump(2) << '\n';
    }
}

} // namespace hyperconv
