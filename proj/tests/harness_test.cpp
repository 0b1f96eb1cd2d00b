#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hyperconv/harness.hpp"

using namespace hyperconv;

TEST_CASE("default grid shape") {
    auto g = default_w_grid();
    CHECK(g.size() == 17);
    CHECK(std::count(g.begin(), g.end(), 1.0) == 1);
    CHECK(g.front() == Catch::Approx(0.25));
    CHECK(g.back() == Catch::Approx(4.0));
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(default_w_grid(2).size() == 33);
}

TEST_CASE("fit_log_divergence") {
    // exact model input: ratio 1, tiny residual
    std::vector<std::pair<double, double>> pts;
    for (double b : {0.99, 0.995, 0.999, 0.9999}) {
        const double w = (1.0 - std::sqrt(1.0 - b)) / std::sqrt(b);
        pts.emplace_back(w, -std::log(std::sqrt(1.0 - b) / 2.0));
    }
    auto fit = fit_log_divergence(pts);
    CHECK(fit.ratio == Catch::Approx(1.0).epsilon(1e-12));
    CHECK(fit.residual < 1e-12);
    // constant values: poor fit, large residual
    auto flat = pts;
    for (auto& p : flat) p.second = 3.0;
    auto bad = fit_log_divergence(flat);
    CHECK(bad.residual > 0.05);
    // too few points
    pts.pop_back();
    CHECK_THROWS_AS(fit_log_divergence(pts), std::invalid_argument);
    // out-of-range w
    std::vector<std::pair<double, double>> far(4, {0.5, 1.0});
    CHECK_THROWS_AS(fit_log_divergence(far), std::invalid_argument);
}

TEST_CASE("theta sweep passes compare and bound checks") {
    SweepSpec sw;
    sw.family = Family::ThetaAlpha;
    sw.ns = {3};
    sw.alphas = {1.5};
    sw.w_norms = {0.5, 1.0, 2.0};
    sw.budget = 100000;
    sw.workers = 2;
    sw.checks = {Check::CompareClosedForm, Check::BoundInequality};
    auto rep = run_sweep(sw);
    CHECK(rep.rows.size() == 6);
    CHECK(rep.failed_checks == 0);
    CHECK(rep.grid_sup > 0.0);
    for (auto& r : rep.rows) {
        CHECK(r.pass);
        CHECK(r.family == "theta_alpha");
    }
}

TEST_CASE("sweep reports are byte-reproducible") {
    SweepSpec sw;
    sw.family = Family::ThetaAlpha;
    sw.ns = {2};
    sw.alphas = {0.75};
    sw.w_norms = {0.5, 1.0};
    sw.budget = 20000;
    sw.workers = 2;
    auto r1 = run_sweep(sw);
    auto r2 = run_sweep(sw);
    std::ostringstream a, b;
    write_csv(r1, a);
    write_csv(r2, b);
    CHECK(a.str() == b.str());
    CHECK(a.str().substr(0, 7) == "family,");
    // header has exactly the documented 14 columns
    const std::string header = a.str().substr(0, a.str().find('\n'));
    CHECK(std::count(header.begin(), header.end(), ',') == 13);
}

TEST_CASE("lambda2 sweep flags the unit sphere") {
    SweepSpec sw;
    sw.family = Family::LambdaN;
    sw.ns = {2};
    sw.alphas = {0.0};
    sw.w_norms = {0.5, 1.0, 2.0};
    sw.budget = 400000;
    sw.workers = 2;
    sw.checks = {Check::CompareClosedForm, Check::SupFinite, Check::LogAsymptote};
    auto rep = run_sweep(sw);
    bool sup_row_seen = false, asym_seen = false;
    for (auto& r : rep.rows) {
        if (r.check == "sup_finite") {
            sup_row_seen = true;
            CHECK_FALSE(r.pass); // divergence at |w| = 1 must break SupFinite
        }
        if (r.check == "log_asymptote") {
            asym_seen = true;
            CHECK(r.mc_value.has_value());
            // honest number: the fit ratio sits near 1.12 at these beta values
            CHECK(*r.mc_value > 1.0);
            CHECK(*r.mc_value < 1.2);
        }
        if (r.check == "compare_closed_form" && r.w_norm == 1.0) {
            CHECK(r.exact);
            CHECK(!r.exact->is_finite());
            CHECK(r.pass); // infinite closed form: pass means the flag fired
        }
    }
    CHECK(sup_row_seen);
    CHECK(asym_seen);
}

TEST_CASE("sweep structural errors") {
    SweepSpec sw;
    sw.ns = {};
    CHECK_THROWS_AS(run_sweep(sw), std::invalid_argument);
    SweepSpec sw2;
    sw2.budget = 0;
    CHECK_THROWS_AS(run_sweep(sw2), std::invalid_argument);
}

TEST_CASE("reduction chain at n = 3") {
    auto rows = check_reduction_chain(3, {0.5, 1.0, 2.0}, 200000, 42, 2);
    REQUIRE(rows.size() == 4); // three equality rows + the Delta_2 comparison
    for (auto& r : rows) {
        INFO(r.family << " |w|=" << r.w_norm << " slack=" << r.slack);
        CHECK(r.pass);
    }
    CHECK_THROWS_AS(check_reduction_chain(6, {1.0}, 1000, 42, 1),
                    std::invalid_argument);
}

TEST_CASE("write_report emits csv, json, manifest") {
    SweepSpec sw;
    sw.family = Family::ThetaAlpha;
    sw.ns = {2};
    sw.alphas = {0.75};
    sw.w_norms = {1.0};
    sw.budget = 5000;
    auto rep = run_sweep(sw);
    const auto dir = std::filesystem::temp_directory_path() / "hyperconv_report_test";
    std::filesystem::remove_all(dir);
    write_report(rep, dir);
    CHECK(std::filesystem::exists(dir / "report.csv"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    std::ifstream in(dir / "manifest.json");
    nlohmann::json m = nlohmann::json::parse(in);
    CHECK(m.at("seed") == 42);
    CHECK(m.at("version") == version_string);
    std::filesystem::remove_all(dir);
}
