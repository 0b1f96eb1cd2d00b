#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

// Data model of the integral families: construction, admissibility per the
// strict parameter windows, homogeneity bookkeeping, canonical JSON form.

namespace hyperconv {

enum class Family {
    LambdaN,
    DeltaN,
    ThetaAlpha,
    ThetaAlphaLambda,
    LambdaNAlpha,
    LambdaAlphaLambda,
    KernelK,
    KernelKAlpha,
    KernelH,
    KernelJ,
};

inline const char* family_name(Family f) {
    switch (f) {
        case Family::LambdaN: return "lambda_n";
        case Family::DeltaN: return "delta_n";
        case Family::ThetaAlpha: return "theta_alpha";
        case Family::ThetaAlphaLambda: return "theta_alpha_lambda";
        case Family::LambdaNAlpha: return "lambda_n_alpha";
        case Family::LambdaAlphaLambda: return "lambda_alpha_lambda";
        case Family::KernelK: return "kernel_k";
        case Family::KernelKAlpha: return "kernel_k_alpha";
        case Family::KernelH: return "kernel_h";
        case Family::KernelJ: return "kernel_j";
    }
    return "?";
}

// Accepts canonical names plus the hyphenated CLI spellings and the short
// aliases "theta", "lambda-n" etc.
inline std::optional<Family> family_from_name(std::string s) {
    for (auto& c : s)
        if (c == '-') c = '_';
    if (s == "theta") s = "theta_alpha";
    if (s == "lambda") s = "lambda_n";
    if (s == "delta") s = "delta_n";
    for (Family f : {Family::LambdaN, Family::DeltaN, Family::ThetaAlpha,
                     Family::ThetaAlphaLambda, Family::LambdaNAlpha,
                     Family::LambdaAlphaLambda, Family::KernelK, Family::KernelKAlpha,
                     Family::KernelH, Family::KernelJ})
        if (s == family_name(f))
            return f;
    return std::nullopt;
}

struct FormSpec {
    Family family = Family::ThetaAlpha;
    int n = 2;                   // ambient dimension
    std::vector<double> alphas;  // per-factor Riesz exponents
    double lambda = 0.0;         // final-factor exponent where applicable
    double tau = 1.0;            // quadric offset
    std::vector<double> w;       // evaluation point
    std::vector<double> v;       // second point, kernel families only

    double w_norm() const {
        double s = 0.0;
        for (double c : w) s += c * c;
        return std::sqrt(s);
    }
    double alpha_sum() const {
        return std::accumulate(alphas.begin(), alphas.end(), 0.0);
    }
};

// Convenience constructors; w along the first axis (all families depend on |w| only).
inline std::vector<double> axis_vector(int n, double norm) {
    std::vector<double> w(n, 0.0);
    w[0] = norm;
    return w;
}

inline FormSpec make_lambda_n(int n, double w_norm, double tau = 1.0) {
    return {Family::LambdaN, n, std::vector<double>(n, n - 1.0), 0.0, tau,
            axis_vector(n, w_norm), {}};
}
inline FormSpec make_delta_n(int n, double w_norm, double tau = 1.0) {
    return {Family::DeltaN, n, std::vector<double>(3, n - 1.0), 0.0, tau,
            axis_vector(n, w_norm), {}};
}
inline FormSpec make_theta(int n, double alpha, double w_norm, double tau = 1.0) {
    return {Family::ThetaAlpha, n, {alpha, alpha}, alpha, tau,
            axis_vector(n, w_norm), {}};
}
inline FormSpec make_theta_lambda(int n, double alpha, double lambda, double w_norm,
                                  double tau = 1.0) {
    return {Family::ThetaAlphaLambda, n, {alpha, lambda}, lambda, tau,
            axis_vector(n, w_norm), {}};
}
inline FormSpec make_lambda_n_alpha(int n, double alpha, double w_norm,
                                    double tau = 1.0) {
    return {Family::LambdaNAlpha, n, std::vector<double>(n, alpha), 0.0, tau,
            axis_vector(n, w_norm), {}};
}
inline FormSpec make_lambda_alpha_lambda(int n, std::vector<double> alphas,
                                         double lambda, double w_norm,
                                         double tau = 1.0) {
    return {Family::LambdaAlphaLambda, n, std::move(alphas), lambda, tau,
            axis_vector(n, w_norm), {}};
}

struct Admissibility {
    enum class Status { Admissible, Inadmissible, BoundaryCase };
    Status status = Status::Admissible;
    std::string reason;           // set for Inadmissible / BoundaryCase
    double homogeneity_power = 0; // rho or sigma of the family
    int pivot_index = -1;         // LambdaAlphaLambda reduction pivot

    bool admissible() const { return status == Status::Admissible; }
};

namespace detail {

inline Admissibility verdict(Admissibility::Status st, std::string why, double hom,
                             int pivot = -1) {
    return {st, std::move(why), hom, pivot};
}

// Open-interval test with boundary detection.
inline Admissibility::Status window(double x, double lo, double hi) {
    if (x == lo || x == hi)
        return Admissibility::Status::BoundaryCase;
    if (x > lo && x < hi)
        return Admissibility::Status::Admissible;
    return Admissibility::Status::Inadmissible;
}

} // namespace detail

inline void validate_structure(const FormSpec& s) {
    if (s.n < 2)
        throw std::invalid_argument("FormSpec: n must be >= 2");
    if (!(s.tau > 0.0))
        throw std::invalid_argument("FormSpec: tau must be positive");
    if ((int)s.w.size() != s.n)
        throw std::invalid_argument("FormSpec: w must live in R^n");
    size_t want = 0;
    switch (s.family) {
        case Family::LambdaN:
        case Family::LambdaNAlpha:
        case Family::KernelK:
        case Family::KernelKAlpha: want = s.n; break;
        case Family::DeltaN:
        case Family::KernelJ: want = 3; break;
        case Family::ThetaAlpha:
        case Family::ThetaAlphaLambda:
        case Family::KernelH: want = 2; break;
        case Family::LambdaAlphaLambda: want = s.n - 1; break;
    }
    if (s.alphas.size() != want)
        throw std::invalid_argument("FormSpec: wrong exponent count for family");
    if (s.family == Family::KernelK || s.family == Family::KernelKAlpha ||
        s.family == Family::KernelH || s.family == Family::KernelJ) {
        if ((int)s.v.size() != s.n)
            throw std::invalid_argument("FormSpec: kernel families need v in R^n");
    }
}

inline Admissibility classify(const FormSpec& s) {
    using St = Admissibility::Status;
    validate_structure(s);
    const int n = s.n;

    switch (s.family) {
        case Family::LambdaN:
            if (n == 2)
                return detail::verdict(St::Inadmissible, "Lambda_2 unbounded", 2.0);
            return detail::verdict(St::Admissible, "", 2.0);
        case Family::DeltaN:
            return detail::verdict(St::Admissible, "", n - 1.0);
        case Family::ThetaAlpha: {
            const double a = s.alphas[0];
            const double sigma = 2.0 * a + 2.0 - n;
            auto st = detail::window(a, (n - 1.0) / 2.0, n - 1.0);
            return detail::verdict(st, st == St::Admissible ? "" : "alpha window",
                                   sigma);
        }
        case Family::ThetaAlphaLambda: {
            const double a = s.alphas[0], l = s.alphas[1];
            const double sigma = a + l + 2.0 - n;
            auto worst = St::Admissible;
            auto fold = [&](St st) {
                if (st == St::Inadmissible || worst == St::Inadmissible)
                    worst = St::Inadmissible;
                else if (st == St::BoundaryCase)
                    worst = St::BoundaryCase;
            };
            fold(l > 0 ? St::Admissible : (l == 0 ? St::BoundaryCase : St::Inadmissible));
            fold(detail::window(a, 0.0, n - 1.0));
            fold(a + l > n - 1.0 ? St::Admissible
                                 : (a + l == n - 1.0 ? St::BoundaryCase
                                                     : St::Inadmissible));
            return detail::verdict(worst, worst == St::Admissible ? "" : "exponent window",
                                   sigma);
        }
        case Family::LambdaNAlpha: {
            const double a = s.alphas[0];
            const double rho = 2.0 + n * (a - n + 1.0);
            if (n < 3)
                return detail::verdict(St::Inadmissible, "needs n >= 3", rho);
            auto st = detail::window(a, n - 1.0 - 2.0 / n, n - 1.0);
            return detail::verdict(st, st == St::Admissible ? "" : "alpha window", rho);
        }
        case Family::LambdaAlphaLambda: {
            const double l = s.lambda;
            const double rho = 2.0 + s.alpha_sum() + l - n * (n - 1.0);
            if (n < 3)
                return detail::verdict(St::Inadmissible, "needs n >= 3", rho);
            auto worst = St::Admissible;
            auto fold = [&](St st) {
                if (st == St::Inadmissible || worst == St::Inadmissible)
                    worst = St::Inadmissible;
                else if (st == St::BoundaryCase)
                    worst = St::BoundaryCase;
            };
            for (double a : s.alphas)
                fold(detail::window(a, 0.0, (double)n));
            fold(l > 0 ? St::Admissible : (l == 0 ? St::BoundaryCase : St::Inadmissible));
            fold(detail::window(rho, 0.0, (double)n));
            // reduction pivot: smallest index whose exponent pairs with lambda
            int pivot = -1;
            bool pivot_boundary = false;
            for (size_t i = 0; i < s.alphas.size(); ++i) {
                const double a = s.alphas[i];
                auto st1 = detail::window(a, 0.0, n - 1.0);
                auto st2 = detail::window(a + l, n - 1.0, 2.0 * (n - 1.0));
                if (st1 == St::Admissible && st2 == St::Admissible) {
                    pivot = (int)i;
                    break;
                }
                if (st1 != St::Inadmissible && st2 != St::Inadmissible)
                    pivot_boundary = true;
            }
            if (pivot < 0)
                fold(pivot_boundary ? St::BoundaryCase : St::Inadmissible);
            return detail::verdict(worst, worst == St::Admissible ? "" : "exponent window",
                                   rho, pivot);
        }
        case Family::KernelH: {
            auto st = detail::window(s.alphas[0], (n - 1.0) / 2.0, n - 1.0);
            return detail::verdict(st, st == St::Admissible ? "" : "alpha window", 0.0);
        }
        case Family::KernelK:
            return detail::verdict(n >= 3 ? St::Admissible : St::Inadmissible,
                                   n >= 3 ? "" : "needs n >= 3", 0.0);
        case Family::KernelKAlpha: {
            if (n < 3)
                return detail::verdict(St::Inadmissible, "needs n >= 3", 0.0);
            auto st = detail::window(s.alphas[0], n - 2.0 - 2.0 / n, n - 1.0);
            return detail::verdict(st, st == St::Admissible ? "" : "alpha window", 0.0);
        }
        case Family::KernelJ:
            return detail::verdict(St::Admissible, "", 0.0);
    }
    throw std::logic_error("classify: unhandled family");
}

struct NormalizedSpec {
    FormSpec spec;
    std::string scale_map; // human-readable description of the dilation applied
};

// Rescale to tau = 1 via (tau, w) -> (1, w / sqrt(tau)). The |w|^power
// prefactor makes the family value exactly invariant under this map.
inline NormalizedSpec dilation_normalize(const FormSpec& s) {
    validate_structure(s);
    if (s.tau == 1.0)
        return {s, "identity (tau already 1)"};
    FormSpec out = s;
    const double scale = std::sqrt(s.tau);
    for (auto& c : out.w) c /= scale;
    for (auto& c : out.v) c /= scale;
    out.tau = 1.0;
    return {out, "w -> w/" + std::to_string(scale) + ", tau -> 1"};
}

inline void to_json(nlohmann::json& j, const FormSpec& s) {
    j = nlohmann::json{{"family", family_name(s.family)},
                       {"n", s.n},
                       {"alphas", s.alphas},
                       {"lambda", s.lambda},
                       {"tau", s.tau},
                       {"w", s.w}};
    if (!s.v.empty())
        j["v"] = s.v;
}

inline void from_json(const nlohmann::json& j, FormSpec& s) {
    auto f = family_from_name(j.at("family").get<std::string>());
    if (!f)
        throw std::invalid_argument("FormSpec: unknown family name");
    s.family = *f;
    j.at("n").get_to(s.n);
    j.at("alphas").get_to(s.alphas);
    s.lambda = j.value("lambda", 0.0);
    s.tau = j.value("tau", 1.0);
    j.at("w").get_to(s.w);
    s.v.clear();
    if (j.contains("v"))
        j.at("v").get_to(s.v);
}

} // namespace hyperconv
