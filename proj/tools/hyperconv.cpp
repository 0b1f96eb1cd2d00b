// hyperconv: evaluate, cross-validate, and bound-verify the delta-constrained
// Riesz convolution families from the command line.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hyperconv/acceptance.hpp"
#include "hyperconv/closedform.hpp"
#include "hyperconv/forms.hpp"
#include "hyperconv/harness.hpp"
#include "hyperconv/kernels.hpp"
#include "hyperconv/oracle.hpp"

namespace {

using namespace hyperconv;

struct Cli {
    std::string family = "theta";
    int n = 2;
    std::vector<double> alphas;
    double lambda = 0.0;
    double tau = 1.0;
    double w_norm = 1.0;
    std::vector<double> w, v;
    long budget = 100000;
    std::uint64_t seed = 42;
    int workers = (int)std::max(1u, std::thread::hardware_concurrency());
    std::string out_dir = "report";
    std::string format = "text";
    std::string preset;
    std::string preset_file = "config/presets.json";
    bool preset_file_set = false;
    std::string exe_path;
};

// Default preset file: next to the working directory, or relative to the
// binary so `sweep --preset` works from anywhere in a build tree.
std::string resolve_preset_file(const Cli& c) {
    namespace fs = std::filesystem;
    if (c.preset_file_set || fs::exists(c.preset_file))
        return c.preset_file;
    const fs::path exe = fs::path(c.exe_path).parent_path();
    for (const auto& cand : {exe / "config/presets.json",
                             exe / "../config/presets.json",
                             exe / "../../config/presets.json"})
        if (fs::exists(cand))
            return cand.lexically_normal().string();
    return c.preset_file;
}

std::uint64_t env_seed_default() {
    if (const char* e = std::getenv("HYPERCONV_SEED"))
        return std::strtoull(e, nullptr, 10);
    return 42;
}

FormSpec build_spec(const Cli& c) {
    auto fam = family_from_name(c.family);
    if (!fam)
        throw CLI::ValidationError("--family", "unknown family '" + c.family + "'");
    FormSpec s;
    s.family = *fam;
    s.n = c.n;
    s.tau = c.tau;
    const double a = c.alphas.empty() ? 0.0 : c.alphas[0];
    auto need_alpha = [&] {
        if (c.alphas.empty())
            throw CLI::ValidationError("--alpha", "required for this family");
    };
    switch (*fam) {
        case Family::LambdaN:
        case Family::KernelK:
            s.alphas.assign(c.n, c.n - 1.0);
            break;
        case Family::DeltaN:
        case Family::KernelJ:
            s.alphas.assign(3, c.n - 1.0);
            break;
        case Family::ThetaAlpha:
            need_alpha();
            s.alphas = {a, a};
            s.lambda = a;
            break;
        case Family::ThetaAlphaLambda:
            need_alpha();
            s.alphas = {a, c.lambda};
            s.lambda = c.lambda;
            break;
        case Family::LambdaNAlpha:
        case Family::KernelKAlpha:
            need_alpha();
            s.alphas.assign(c.n, a);
            break;
        case Family::LambdaAlphaLambda:
            need_alpha();
            s.alphas = c.alphas.size() == (size_t)(c.n - 1)
                           ? c.alphas
                           : std::vector<double>(c.n - 1, a);
            s.lambda = c.lambda;
            break;
        case Family::KernelH:
            need_alpha();
            s.alphas = {a, a};
            break;
    }
    s.w = c.w.empty() ? axis_vector(c.n, c.w_norm) : c.w;
    if ((int)s.w.size() != c.n)
        throw CLI::ValidationError("--w", "must have n components");
    const bool kernel = *fam == Family::KernelK || *fam == Family::KernelKAlpha ||
                        *fam == Family::KernelH || *fam == Family::KernelJ;
    if (kernel) {
        s.v = c.v.empty() ? s.w : c.v;
        if ((int)s.v.size() != c.n)
            throw CLI::ValidationError("--v", "must have n components");
    }
    validate_structure(s);
    return s;
}

int cmd_eval(const Cli& c) {
    FormSpec s = build_spec(c);
    auto adm = classify(s);
    std::optional<ExtendedReal> exact, bound;
    switch (s.family) {
        case Family::LambdaN:
            if (s.n == 2) exact = lambda2_exact(s.w_norm());
            break;
        case Family::ThetaAlpha:
        case Family::ThetaAlphaLambda: {
            const double l = s.family == Family::ThetaAlpha ? s.alphas[0] : s.alphas[1];
            exact = theta_exact(s.n, s.alphas[0], l, s.w_norm());
            try {
                bound = theta_bound(s.n, s.alphas[0], l, s.w_norm()).upper_bound;
            } catch (const std::domain_error&) {
            }
            break;
        }
        default:
            break;
    }
    const char* status = adm.admissible() ? "admissible"
                         : adm.status == Admissibility::Status::BoundaryCase
                             ? "boundary case"
                             : "inadmissible";
    if (c.format == "json") {
        nlohmann::json j{{"spec", s},
                         {"admissibility", status},
                         {"reason", adm.reason},
                         {"homogeneity_power", adm.homogeneity_power}};
        j["exact"] = exact ? nlohmann::json(exact->str()) : nlohmann::json();
        j["bound"] = bound ? nlohmann::json(bound->str()) : nlohmann::json();
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << family_name(s.family) << " n=" << s.n << " |w|=" << s.w_norm()
              << " tau=" << s.tau << '\n';
    std::cout << "admissibility: " << status;
    if (!adm.reason.empty())
        std::cout << " (" << adm.reason << ")";
    std::cout << '\n';
    if (exact) {
        if (exact->is_infinite())
            std::cout << "exact: diverges (PositiveInfinity)\n";
        else
            std::cout << "exact: " << exact->str() << '\n';
    } else {
        std::cout << "exact: no closed form for this family (use the oracle command)\n";
    }
    if (bound)
        std::cout << "bound: " << bound->str() << '\n';
    return 0;
}

int cmd_oracle(const Cli& c) {
    FormSpec s = build_spec(c);
    const bool kernel = s.family == Family::KernelK || s.family == Family::KernelKAlpha ||
                        s.family == Family::KernelH || s.family == Family::KernelJ;
    RngStream rng{c.seed, 0};
    McEstimate est = kernel ? estimate_kernel(s, c.budget, rng, c.workers)
                            : estimate(s, c.budget, rng, c.workers);
    if (c.format == "json") {
        nlohmann::json j{{"spec", s},
                         {"value", est.value.str()},
                         {"stderr", est.stderr_},
                         {"n_samples", est.n_samples},
                         {"n_live", est.n_live},
                         {"proposal", est.proposal_tag},
                         {"divergence_suspected", est.divergence_suspected},
                         {"seed", c.seed},
                         {"workers", c.workers}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << family_name(s.family) << " n=" << s.n << " |w|=" << s.w_norm()
              << " budget=" << est.n_samples << " seed=" << c.seed << '\n';
    std::cout << "estimate: " << est.value.str() << " +/- " << est.stderr_
              << "  (live " << est.n_live << "/" << est.n_samples << ")\n";
    if (est.divergence_suspected)
        std::cout << "warning: divergence suspected (heavy-tailed weights)\n";
    return 0;
}

Check check_from_name(const std::string& s) {
    for (Check c : {Check::CompareClosedForm, Check::BoundInequality,
                    Check::DilationInvariance, Check::RotationInvariance,
                    Check::LogAsymptote, Check::ReductionInequality,
                    Check::SupFinite})
        if (s == check_name(c))
            return c;
    throw CLI::ValidationError("--checks", "unknown check '" + s + "'");
}

int cmd_sweep(const Cli& c, const std::vector<std::string>& check_names) {
    SweepSpec sw;
    auto fam = family_from_name(c.family);
    if (!fam)
        throw CLI::ValidationError("--family", "unknown family '" + c.family + "'");
    sw.family = *fam;
    sw.ns = {c.n};
    sw.alphas = c.alphas.empty() ? std::vector<double>{0.0} : c.alphas;
    if (c.lambda != 0.0)
        sw.lambdas = {c.lambda};
    sw.budget = c.budget;
    sw.seed = c.seed;
    sw.workers = c.workers;
    if (!check_names.empty()) {
        sw.checks.clear();
        for (const auto& s : check_names)
            sw.checks.push_back(check_from_name(s));
    }
    if (!c.preset.empty()) {
        const std::string path = resolve_preset_file(c);
        std::ifstream in(path);
        if (!in)
            throw CLI::ValidationError("--preset-file", "cannot open " + path);
        nlohmann::json all = nlohmann::json::parse(in);
        if (!all.contains(c.preset))
            throw CLI::ValidationError("--preset",
                                       "no preset '" + c.preset + "' in " + path);
        const auto& p = all.at(c.preset);
        if (p.contains("family"))
            sw.family = *family_from_name(p.at("family").get<std::string>());
        if (p.contains("ns")) p.at("ns").get_to(sw.ns);
        if (p.contains("alphas")) p.at("alphas").get_to(sw.alphas);
        if (p.contains("lambdas")) p.at("lambdas").get_to(sw.lambdas);
        if (p.contains("w_norms")) p.at("w_norms").get_to(sw.w_norms);
        if (p.contains("budget")) sw.budget = p.at("budget").get<long>();
        if (p.contains("checks")) {
            sw.checks.clear();
            for (const auto& s : p.at("checks"))
                sw.checks.push_back(check_from_name(s.get<std::string>()));
        }
    }
    SweepReport rep = run_sweep(sw);
    write_report(rep, c.out_dir);
    std::cout << "wrote " << c.out_dir << "/report.csv, report.json, manifest.json ("
              << rep.rows.size() << " rows, " << rep.failed_checks
              << " failed checks, grid sup " << rep.grid_sup << ")\n";
    return rep.failed_checks == 0 ? 0 : 1;
}

int cmd_verify(const Cli& c) {
    auto rows = check_reduction_chain(c.n, default_w_grid(), c.budget, c.seed,
                                      c.workers);
    int failed = 0;
    for (const auto& r : rows) {
        if (!r.pass)
            ++failed;
        std::cout << (r.pass ? "pass" : "FAIL") << "  " << r.family << " n=" << r.n
                  << " |w|=" << r.w_norm << " slack=" << r.slack << '\n';
    }
    std::cout << rows.size() << " checks, " << failed << " failed\n";
    return failed == 0 ? 0 : 1;
}

int cmd_acceptance(const Cli& c) {
    AcceptanceOptions o;
    o.budget = c.budget;
    o.workers = c.workers;
    o.seed = c.seed;
    auto results = run_acceptance(o);
    int failed = 0;
    for (const auto& r : results) {
        if (!r.pass)
            ++failed;
        std::printf("%s  criterion %2d: %s — %s\n", r.pass ? "PASS" : "FAIL", r.id,
                    r.name.c_str(), r.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", (int)results.size() - failed,
                results.size());
    return failed == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"delta-constrained Riesz convolution integrals: closed forms, "
                 "Monte-Carlo oracle, sweeps, acceptance suite"};
    app.require_subcommand(1);

    Cli c;
    c.seed = env_seed_default();
    c.exe_path = argv && argv[0] ? argv[0] : "";
    std::vector<std::string> check_names;

    auto add_common = [&](CLI::App* sub, bool spec_flags) {
        sub->add_option("--budget", c.budget, "MC sample budget");
        sub->add_option("--seed", c.seed, "RNG seed (default HYPERCONV_SEED or 42)");
        sub->add_option("--workers", c.workers, "worker thread count");
        sub->add_option("--format", c.format, "output format: text|json|csv")
            ->check(CLI::IsMember({"text", "json", "csv"}));
        if (spec_flags) {
            sub->add_option("--family", c.family, "family name (e.g. theta, lambda-n)");
            sub->add_option("--n", c.n, "ambient dimension");
            sub->add_option("--alpha", c.alphas, "Riesz exponent(s)");
            sub->add_option("--lambda", c.lambda, "final-factor exponent");
            sub->add_option("--tau", c.tau, "quadric offset");
            sub->add_option("--w-norm", c.w_norm, "|w| (canonical axis vector)");
            sub->add_option("--w", c.w, "w as components (overrides --w-norm)");
            sub->add_option("--v", c.v, "second point, kernel families");
        }
    };

    auto* ev = app.add_subcommand("eval", "closed-form value and bound");
    add_common(ev, true);
    auto* orc = app.add_subcommand("oracle", "Monte-Carlo estimate");
    add_common(orc, true);
    auto* sw = app.add_subcommand("sweep", "grid sweep with checks; writes a report");
    add_common(sw, true);
    sw->add_option("--checks", check_names, "check names for the sweep");
    sw->add_option("--out", c.out_dir, "output directory");
    sw->add_option("--preset", c.preset, "preset name from the preset file");
    sw->add_option("--preset-file", c.preset_file, "preset JSON path")
        ->each([&](const std::string&) { c.preset_file_set = true; });
    auto* vf = app.add_subcommand("verify", "reduction-chain inequalities");
    add_common(vf, true);
    auto* ac = app.add_subcommand("acceptance", "run the full acceptance suite");
    add_common(ac, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (ev->parsed()) return cmd_eval(c);
        if (orc->parsed()) return cmd_oracle(c);
        if (sw->parsed()) return cmd_sweep(c, check_names);
        if (vf->parsed()) return cmd_verify(c);
        if (ac->parsed()) return cmd_acceptance(c);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
