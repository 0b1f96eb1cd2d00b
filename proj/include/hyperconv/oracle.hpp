#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "hyperconv/extended_real.hpp"
#include "hyperconv/forms.hpp"
#include "hyperconv/rng.hpp"
#include "hyperconv/specialfun.hpp"

// Monte-Carlo evaluation of the delta-constrained families directly from
// their multidimensional definitions. Both delta constraints are resolved
// analytically: the linear one eliminates the negated factor, the quadric
// one is linear in the pivot radius once a direction is fixed.

namespace hyperconv {

struct McEstimate {
    ExtendedReal value = ExtendedReal::finite(0);
    double stderr_ = 0.0;
    long n_samples = 0;
    long n_live = 0; // samples landing in the constraint's support
    std::string proposal_tag;
    bool divergence_suspected = false;
};

struct DeltaResolution {
    enum class Branch { PositiveRoot, NoRoot };
    double pivot_radius = 0.0; // rho*
    double jacobian = 0.0;     // 1/|2 v.omega|
    Branch branch = Branch::NoRoot;
};

// With the pivot written as rho*omega and the negated factor as v - rho*omega,
// the quadric argument is tau + S - |v|^2 + 2 rho (v.omega): one positive root
// when the numerator and v.omega share sign.
inline DeltaResolution resolve_quadric_delta(double tau, double S,
                                             const std::vector<double>& v,
                                             const std::vector<double>& omega) {
    double vv = 0.0, d = 0.0;
    for (size_t i = 0; i < v.size(); ++i) {
        vv += v[i] * v[i];
        d += v[i] * omega[i];
    }
    const double num = vv - S - tau;
    DeltaResolution r;
    if (d == 0.0 || num == 0.0 || (num > 0) != (d > 0))
        return r; // NoRoot, a value rather than an error
    r.pivot_radius = num / (2.0 * d);
    r.jacobian = 1.0 / (2.0 * std::abs(d));
    r.branch = DeltaResolution::Branch::PositiveRoot;
    return r;
}

// One accepted sample, reconstructed in full for support checking.
struct SampleRecord {
    std::vector<std::vector<double>> positive; // factors inside the quadric sum
    std::vector<double> negated;
    double tau = 1.0;
    std::vector<double> w;
};
using SampleObserver = std::function<void(const SampleRecord&)>;

namespace detail {

// Radial proposal with density g(r) = 2 r^{shape-1} (1+r^2)^{-(shape+tail)/2} / B(shape/2, tail/2):
// the small-r power cancels the Riesz singularity exactly and the tail is a
// matched power law, keeping importance weights polynomially bounded.
struct RadialProposal {
    double shape = 1.0;
    double tail = 1.0;
    double beta_norm = 1.0; // B(shape/2, tail/2)

    void init(double s, double t) {
        shape = s;
        tail = t;
        beta_norm = beta_fn(s / 2.0, t / 2.0);
    }
    double sample(std::mt19937_64& g) const {
        std::gamma_distribution<double> ga(shape / 2.0, 1.0), gb(tail / 2.0, 1.0);
        double a = ga(g), b = gb(g);
        while (b <= 0.0) b = gb(g);
        return std::sqrt(a / b);
    }
    double inv_density(double r) const {
        return 0.5 * beta_norm * std::pow(r, 1.0 - shape) *
               std::pow(1.0 + r * r, 0.5 * (shape + tail));
    }
};

inline void unit_vector(std::mt19937_64& g, std::vector<double>& out) {
    std::normal_distribution<double> nd;
    double nrm = 0.0;
    do {
        nrm = 0.0;
        for (auto& c : out) {
            c = nd(g);
            nrm += c * c;
        }
    } while (nrm < 1e-24);
    nrm = std::sqrt(nrm);
    for (auto& c : out) c /= nrm;
}

// Unit vector orthogonal to vhat (Gaussian, projected, normalized).
inline void unit_perp(std::mt19937_64& g, const std::vector<double>& vhat,
                      std::vector<double>& out) {
    std::normal_distribution<double> nd;
    for (;;) {
        double dot = 0.0;
        for (size_t i = 0; i < out.size(); ++i) {
            out[i] = nd(g);
            dot += out[i] * vhat[i];
        }
        double nrm = 0.0;
        for (size_t i = 0; i < out.size(); ++i) {
            out[i] -= dot * vhat[i];
            nrm += out[i] * out[i];
        }
        if (nrm > 1e-24) {
            nrm = std::sqrt(nrm);
            for (auto& c : out) c /= nrm;
            return;
        }
    }
}

// Factor layout of one family: sampled ("free") factors, the pivot whose
// radius the quadric delta fixes, and the negated factor eliminated by the
// linear delta.
struct FactorScheme {
    int n = 2;
    double tau = 1.0;
    std::vector<double> w;
    std::vector<double> free_exps;
    double pivot_exp = 1.0;
    double neg_exp = 1.0;
    double hom_power = 0.0;
};

inline FactorScheme make_scheme(const FormSpec& s) {
    validate_structure(s);
    const Admissibility adm = classify(s);
    FactorScheme sch;
    sch.n = s.n;
    sch.tau = s.tau;
    sch.w = s.w;
    sch.hom_power = adm.homogeneity_power;
    switch (s.family) {
        case Family::LambdaN:
        case Family::LambdaNAlpha: {
            const double e = s.alphas[0];
            sch.free_exps.assign(s.n - 2, e);
            sch.pivot_exp = e;
            sch.neg_exp = e;
            break;
        }
        case Family::DeltaN: {
            const double e = s.n - 1.0;
            sch.free_exps.assign(1, e);
            sch.pivot_exp = e;
            sch.neg_exp = e;
            break;
        }
        case Family::ThetaAlpha:
            sch.pivot_exp = s.alphas[0];
            sch.neg_exp = s.alphas[1];
            break;
        case Family::ThetaAlphaLambda:
            sch.pivot_exp = s.alphas[0];
            sch.neg_exp = s.alphas[1];
            break;
        case Family::LambdaAlphaLambda: {
            int pivot = adm.pivot_index;
            if (pivot < 0)
                pivot = (int)s.alphas.size() - 1; // probing outside the window
            for (size_t i = 0; i < s.alphas.size(); ++i)
                if ((int)i != pivot)
                    sch.free_exps.push_back(s.alphas[i]);
            sch.pivot_exp = s.alphas[pivot];
            sch.neg_exp = s.lambda;
            break;
        }
        default:
            throw std::invalid_argument("estimate: kernel families use estimate_kernel");
    }
    for (double e : sch.free_exps)
        if (!(e < s.n))
            throw std::invalid_argument("estimate: proposal needs every free exponent < n");
    return sch;
}

struct WorkerAccum {
    double sum = 0.0, sumsq = 0.0;
    long live = 0;
    std::vector<double> top; // min-heap, capped at top_k
    size_t top_k = 1;

    void add(double val) {
        sum += val;
        sumsq += val * val;
        if (val > 0.0) {
            ++live;
            if (top.size() < top_k) {
                top.push_back(val);
                std::push_heap(top.begin(), top.end(), std::greater<>());
            } else if (val > top.front()) {
                std::pop_heap(top.begin(), top.end(), std::greater<>());
                top.back() = val;
                std::push_heap(top.begin(), top.end(), std::greater<>());
            }
        }
    }
};

inline void run_worker(const FactorScheme& sch, long samples, RngStream rng,
                       WorkerAccum& acc, const SampleObserver* observer) {
    auto gen = rng.engine();
    const int n = sch.n;
    const double sigma_n1 = sphere_area(n - 1);
    const double sigma_n2 = sphere_area(n - 2);
    const double w_norm = [&] {
        double t = 0.0;
        for (double c : sch.w) t += c * c;
        return std::sqrt(t);
    }();
    const double pref = sch.hom_power == 0.0 ? 1.0 : std::pow(w_norm, sch.hom_power);

    // Free-factor proposals: small-r shape n - e (exact singularity
    // cancellation), tail exponent 1.
    std::vector<RadialProposal> free_prop(sch.free_exps.size());
    std::vector<double> free_const(sch.free_exps.size());
    for (size_t k = 0; k < sch.free_exps.size(); ++k) {
        free_prop[k].init(n - sch.free_exps[k], 1.0);
        free_const[k] = sigma_n1;
    }

    const bool degenerate =
        sch.free_exps.empty() &&
        std::abs(w_norm * w_norm - sch.tau) <= 1e-9 * (1.0 + w_norm * w_norm + sch.tau);

    // Pivot radius proposal for the degenerate path. The quadric jacobian
    // eats one power of rho, so exact cancellation wants shape n-1-e.
    RadialProposal pivot_prop;
    if (degenerate) {
        double s = n - 1.0 - sch.pivot_exp;
        double c = sch.pivot_exp + sch.neg_exp - (n - 1.0);
        pivot_prop.init(s > 1e-9 ? s : 0.5, c > 1e-9 ? c : 1.0);
    }

    // Direction mixture for the generic path: when the integrand carries a
    // residual |v.omega|^{-gamma} singularity, half the draws concentrate u
    // near 0 with a power map that cancels it.
    const double gamma = n - sch.pivot_exp - sch.neg_exp;
    const bool mix_u = !degenerate && gamma > 0.05;
    int mix_m = 1;
    double z_n = 1.0;
    if (mix_u) {
        mix_m = std::min(8, (int)std::ceil(1.0 / (1.0 - std::min(gamma, 0.9))) + 1);
        z_n = beta_fn(0.5, (n - 1) / 2.0); // int (1-u^2)^{(n-3)/2} du
    }

    std::vector<double> v(n), omega(n), phi(n), vhat(n), dir(n);
    std::vector<std::vector<double>> free_x(sch.free_exps.size(),
                                            std::vector<double>(n));
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    for (long it = 0; it < samples; ++it) {
        double W = pref;
        double S = 0.0;
        v = sch.w;
        for (size_t k = 0; k < sch.free_exps.size(); ++k) {
            const double r = free_prop[k].sample(gen);
            unit_vector(gen, dir);
            for (int i = 0; i < n; ++i) {
                free_x[k][i] = r * dir[i];
                v[i] -= free_x[k][i];
            }
            S += r * r;
            W *= free_const[k] * free_prop[k].inv_density(r) *
                 std::pow(r, n - 1.0 - sch.free_exps[k]);
        }
        double vv = 0.0;
        for (double c : v) vv += c * c;
        const double vn = std::sqrt(vv);
        if (vn < 1e-12 || W == 0.0) {
            acc.add(0.0);
            continue;
        }

        double val = 0.0;
        double rho = 0.0, u = 0.0;
        bool live = false;

        if (degenerate) {
            rho = pivot_prop.sample(gen);
            u = (vv - S - sch.tau) / (2.0 * rho * vn);
            if (std::abs(u) < 1.0 - 1e-14) {
                for (int i = 0; i < n; ++i) vhat[i] = v[i] / vn;
                unit_perp(gen, vhat, phi);
                const double su = std::sqrt(1.0 - u * u);
                for (int i = 0; i < n; ++i) omega[i] = u * vhat[i] + su * phi[i];
                val = W * std::pow(rho, n - 1.0 - sch.pivot_exp) *
                      std::pow(1.0 - u * u, 0.5 * (n - 3)) * sigma_n2 /
                      (2.0 * rho * vn) * pivot_prop.inv_density(rho) *
                      std::pow(sch.tau + S + rho * rho, -0.5 * sch.neg_exp);
                live = true;
            }
        } else {
            double dir_weight;
            if (!mix_u) {
                unit_vector(gen, omega);
                dir_weight = sigma_n1;
            } else {
                for (int i = 0; i < n; ++i) vhat[i] = v[i] / vn;
                if (unif(gen) < 0.5) {
                    unit_vector(gen, omega);
                    u = 0.0;
                    for (int i = 0; i < n; ++i) u += omega[i] * vhat[i];
                } else {
                    const double y = unif(gen);
                    u = (unif(gen) < 0.5 ? 1.0 : -1.0) * std::pow(y, mix_m);
                    unit_perp(gen, vhat, phi);
                    const double su = std::sqrt(std::max(0.0, 1.0 - u * u));
                    for (int i = 0; i < n; ++i) omega[i] = u * vhat[i] + su * phi[i];
                }
                const double om2 = 1.0 - u * u;
                if (om2 <= 1e-16) {
                    acc.add(0.0);
                    continue;
                }
                const double meas = std::pow(om2, 0.5 * (n - 3));
                const double q = 0.5 * meas / z_n +
                                 0.5 / (2.0 * mix_m) *
                                     std::pow(std::abs(u), (1.0 - mix_m) / (double)mix_m);
                dir_weight = meas * sigma_n2 / q;
            }
            double d = 0.0;
            for (int i = 0; i < n; ++i) d += v[i] * omega[i];
            if (std::abs(d) >= 1e-8 * vn) {
                const auto res = resolve_quadric_delta(sch.tau, S, v, omega);
                if (res.branch == DeltaResolution::Branch::PositiveRoot) {
                    rho = res.pivot_radius;
                    val = W * dir_weight * std::pow(rho, n - 1.0 - sch.pivot_exp) *
                          res.jacobian *
                          std::pow(sch.tau + S + rho * rho, -0.5 * sch.neg_exp);
                    live = true;
                }
            }
        }

        if (live && observer) {
            SampleRecord rec;
            rec.tau = sch.tau;
            rec.w = sch.w;
            rec.positive = free_x;
            std::vector<double> xp(n), xn(n);
            for (int i = 0; i < n; ++i) {
                xp[i] = rho * omega[i];
                xn[i] = v[i] - xp[i];
            }
            rec.positive.push_back(xp);
            rec.negated = xn;
            (*observer)(rec);
        }
        acc.add(val);
    }
}

struct Merged {
    double mean = 0.0, stderr_ = 0.0;
    long live = 0;
    bool heavy_tail = false;
};

inline Merged merge(std::vector<WorkerAccum>& accs, long budget, size_t top_k) {
    Merged m;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> tops;
    for (auto& a : accs) {
        sum += a.sum;
        sumsq += a.sumsq;
        m.live += a.live;
        tops.insert(tops.end(), a.top.begin(), a.top.end());
    }
    m.mean = sum / budget;
    const double var = std::max(0.0, sumsq / budget - m.mean * m.mean);
    m.stderr_ = std::sqrt(var / budget);
    if (sum > 0.0 && !tops.empty()) {
        std::sort(tops.begin(), tops.end(), std::greater<>());
        double top_sum = 0.0;
        for (size_t i = 0; i < std::min(top_k, tops.size()); ++i)
            top_sum += tops[i];
        m.heavy_tail = top_sum > 0.5 * sum;
    }
    return m;
}

} // namespace detail

// Importance-sampling estimate of spec's integral. Unbiased; admissibility
// is not required, so divergent regions can be probed (watch the
// divergence_suspected flag). Deterministic given (seed, workers, budget).
inline McEstimate estimate(const FormSpec& spec, long budget, RngStream rng,
                           int workers = 1, const SampleObserver* observer = nullptr) {
    if (budget <= 0)
        throw std::invalid_argument("estimate: budget must be positive");
    const auto sch = detail::make_scheme(spec);
    McEstimate out;
    out.n_samples = budget;
    out.proposal_tag = "beta-prime-radial";

    if (sch.hom_power > 0.0 && spec.w_norm() == 0.0) {
        // |w|^power prefactor kills the value exactly
        out.value = ExtendedReal::finite(0.0);
        return out;
    }

    workers = std::max(1, workers);
    const size_t top_k = std::max<size_t>(1, budget / 1000);
    std::vector<detail::WorkerAccum> accs(workers);
    for (auto& a : accs) a.top_k = top_k;

    if (workers == 1 || observer) {
        // observer runs serialized; parallel observation would reorder records
        long done = 0;
        for (int j = 0; j < workers; ++j) {
            long chunk = budget / workers + (j < budget % workers ? 1 : 0);
            detail::run_worker(sch, chunk, rng.split(j), accs[j], observer);
            done += chunk;
        }
        (void)done;
    } else {
        std::vector<std::thread> threads;
        for (int j = 0; j < workers; ++j) {
            long chunk = budget / workers + (j < budget % workers ? 1 : 0);
            threads.emplace_back(detail::run_worker, std::cref(sch), chunk,
                                 rng.split(j), std::ref(accs[j]), nullptr);
        }
        for (auto& t : threads) t.join();
    }

    auto m = detail::merge(accs, budget, top_k);
    if (std::isnan(m.mean))
        throw std::runtime_error("estimate: NaN accumulator");
    out.value = ExtendedReal::finite(m.mean);
    out.stderr_ = m.stderr_;
    out.n_live = m.live;
    out.divergence_suspected = m.heavy_tail;
    return out;
}

} // namespace hyperconv
