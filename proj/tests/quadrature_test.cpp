#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "hyperconv/quadrature.hpp"
#include "hyperconv/specialfun.hpp"

using namespace hyperconv;
using std::numbers::pi;

TEST_CASE("integrate_adaptive pins") {
    CHECK(integrate_adaptive([](double) { return 1.0; }, 0.0, 0.0) ==
          Catch::Approx(1.0).epsilon(1e-12));
    CHECK(integrate_adaptive([](double u) { return std::pow(u, -0.5); }, -0.5, 0.0) ==
          Catch::Approx(2.0).epsilon(1e-10));
    auto g = [](double u) { return std::pow(u, -0.5) * std::pow(1.0 - u, -0.75); };
    CHECK(integrate_adaptive(g, -0.5, -0.75) ==
          Catch::Approx(beta_fn(0.5, 0.25)).epsilon(1e-8));
    CHECK_THROWS_AS(integrate_adaptive(g, -1.0, 0.0), std::domain_error);
}

TEST_CASE("integrate_reduced pins") {
    CHECK(integrate_reduced({1.0, 0.5, 0.5, 0.5, 0.0}).value() ==
          Catch::Approx(pi).epsilon(1e-9));
    CHECK(integrate_reduced({1.0, 0.5, 0.5, 0.5, 1.0}).is_infinite());
    CHECK(integrate_reduced({1.0, 0.5, 0.5, 0.5, 0.96}).value() ==
          Catch::Approx(pi * gauss_2f1(0.5, 0.5, 1.0, 0.96)).epsilon(1e-7));
    CHECK(integrate_reduced({0.0, 0.5, 0.5, 0.5, 0.3}).value() == 0.0);
    // analytic divergence tests
    CHECK(integrate_reduced({1.0, -0.5, 0.5, 0.5, 0.0}).is_infinite());
    CHECK(integrate_reduced({1.0, 0.5, -0.5, 0.5, 0.0}).is_infinite());
    // beta = 1 but q - s > 0 converges: B(p, q - s)
    CHECK(integrate_reduced({1.0, 0.5, 1.5, 0.5, 1.0}).value() ==
          Catch::Approx(beta_fn(0.5, 1.0)).epsilon(1e-8));
    CHECK_THROWS_AS(integrate_reduced({1.0, 0.5, 0.5, 0.5, 1.5}), std::domain_error);
}

TEST_CASE("Euler identity for random reduced integrands") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int it = 0; it < 20; ++it) {
        ReducedIntegrand f;
        f.coefficient = 0.5 + unif(gen);
        f.p = 0.3 + 1.5 * unif(gen);
        f.q = 0.3 + 1.5 * unif(gen);
        f.s = 0.2 + 1.2 * unif(gen);
        f.beta = 0.95 * unif(gen);
        const double lhs = integrate_reduced(f).value();
        const double rhs = f.coefficient * beta_fn(f.p, f.q) *
                           gauss_2f1(f.s, f.p, f.p + f.q, f.beta);
        CHECK(lhs == Catch::Approx(rhs).epsilon(1e-7));
    }
}

TEST_CASE("monotone in beta") {
    double prev = 0.0;
    for (double b : {0.0, 0.2, 0.4, 0.6, 0.8, 0.95, 0.999}) {
        const double v = integrate_reduced({1.0, 0.7, 0.9, 0.6, b}).value();
        CHECK(v >= prev);
        prev = v;
    }
}

TEST_CASE("refinement convergence") {
    ReducedIntegrand f{1.0, 0.4, 0.6, 0.5, 0.9};
    QuadratureOptions loose, tight;
    loose.rel_tol = 1e-6;
    tight.rel_tol = 5e-7;
    const double a = integrate_reduced(f, loose).value();
    const double b = integrate_reduced(f, tight).value();
    CHECK(std::abs(a - b) <= 1e-6 * std::abs(a) + 1e-12);
}
