#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"
#include "levelmass/radial_potential.hpp"
#include "oracles.hpp"

using namespace levelmass;

TEST_CASE("flat Green's function") {
    const auto sol = RadialPotential::solve_green(MetricModel::flat());
    CHECK(sol.u(2.0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(sol.grad_norm(3.0) == doctest::Approx(1.0 / 9.0).epsilon(1e-14));
    CHECK(sol.flux_constant() == 1.0);
    CHECK(sol.radius_of_level(1.0 - 0.1) == doctest::Approx(10.0).epsilon(1e-14));
}

TEST_CASE("Schwarzschild exterior oracle") {
    const auto sol = RadialPotential::schwarzschild_exterior(2.0);
    for (double r : {1.0, 9.0, 100.0, 1e5})
        CHECK(sol.u(r) == doctest::Approx(oracles::schw_u(2.0, r)).epsilon(1e-15));
    // |grad u| = 1/rho^2
    const double rho9 = 9.0 * std::pow(10.0 / 9.0, 2.0);
    CHECK(sol.grad_norm(9.0) == doctest::Approx(1.0 / (rho9 * rho9)).epsilon(1e-14));
}

TEST_CASE("Green solve on a complete smoothed metric matches independent quadrature") {
    const MetricModel model = MetricModel::smoothed_schwarzschild(2.0, 1.0);
    const auto sol = RadialPotential::solve_green(model);

    // frozen high-precision reference at r = 1e4, compared with the expansion
    CHECK(std::abs(sol.u(1e4) - oracles::kU_smoothed_m2_a1_r1e4) < 1e-15);
    CHECK(std::abs(sol.u(1e4) - (1.0 - 1e-4 + 1e-8)) < 1e-11);

    // test-only Simpson integration of 1/(s^2 phi^2) over [r, 1e6] plus tail
    for (double r : {0.05, 0.8, 5.0, 3e3}) {
        auto f = [&model](double s) {
            const double p = model.conformal_factor(s);
            return 1.0 / (s * s * p * p);
        };
        const double deficit =
            oracles::adaptive_simpson(f, r, 1e6, 1e-14) + 1.0 / (1e6 + 1.0);
        CHECK(sol.deficit(r) == doctest::Approx(deficit).epsilon(1e-10));
    }

    // near the pole u ~ 1 - K/r with K = 1/phi(0)^2 = 1/4
    CHECK(sol.deficit(1e-6) * 1e-6 == doctest::Approx(0.25).epsilon(1e-3));
}

TEST_CASE("Green flux identity at every grid node") {
    const auto sol =
        RadialPotential::solve_green(MetricModel::smoothed_schwarzschild(1.0, 0.5));
    const MetricModel& model = sol.model();
    double worst = 0.0;
    for (std::size_t i = 0; i < sol.r_nodes().size(); i += 7) {
        const double r = sol.r_nodes()[i];
        const double phi = model.conformal_factor(r);
        const double flux = kFourPi * r * r * phi * phi * sol.du_dr(r);
        worst = std::max(worst, std::abs(flux - kFourPi));
    }
    CHECK(worst < 1e-10 * kFourPi);
}

TEST_CASE("u' from the conserved flux agrees with differencing the potential") {
    const auto sol =
        RadialPotential::solve_green(MetricModel::smoothed_schwarzschild(2.0, 1.0));
    for (double r : {0.02, 0.5, 7.0, 900.0}) {
        const double fd = central_derivative([&sol](double x) { return sol.u(x); }, r,
                                             1e-4 * r);
        CHECK(fd == doctest::Approx(sol.du_dr(r)).epsilon(1e-8));
    }
}

TEST_CASE("flat capacitary closed forms") {
    const MetricModel model = MetricModel::flat(1.0);
    SUBCASE("p = 2") {
        const auto sol = RadialPotential::solve_capacitary(model, 2.0);
        CHECK(sol.u(4.0) == doctest::Approx(0.75).epsilon(1e-14));
        CHECK(sol.capacity() == doctest::Approx(kFourPi).epsilon(1e-14));
        CHECK(sol.c_p() == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("p = 1.5") {
        const auto sol = RadialPotential::solve_capacitary(model, 1.5);
        CHECK(sol.c_p() == doctest::Approx(3.0).epsilon(1e-14));
        CHECK(sol.capacity() == doctest::Approx(kFourPi * std::sqrt(3.0)).epsilon(1e-14));
        CHECK(sol.u(2.0) == doctest::Approx(1.0 - 1.0 / 8.0).epsilon(1e-14));
        CHECK(sol.beta_p() == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("numeric path reproduces the closed forms") {
        RadialSolveOptions opts;
        opts.force_numeric = true;
        for (double p : {1.2, 1.5, 2.0, 2.5}) {
            const auto sol = RadialPotential::solve_capacitary(model, p, opts);
            CHECK(std::abs(sol.beta_p() - 1.0) < 1e-10);
            const double cp_exact = (3.0 - p) / (p - 1.0);
            CHECK(std::abs(sol.c_p() - cp_exact) < 1e-9 * cp_exact);
        }
    }
}

TEST_CASE("Schwarzschild capacitary") {
    const MetricModel model = MetricModel::schwarzschild(1.0, 0.5); // horizon boundary
    SUBCASE("p = 2 closed form") {
        const auto sol = RadialPotential::solve_capacitary(model, 2.0);
        CHECK(sol.c_p() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(sol.capacity() == doctest::Approx(kFourPi).epsilon(1e-14));
        CHECK(sol.beta_p() == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(sol.u(4.5) == doctest::Approx(1.0 - 1.0 / 5.0).epsilon(1e-14));
    }
    SUBCASE("p = 1.5 has the exact normalizer c_p = 7.5") {
        const auto sol = RadialPotential::solve_capacitary(model, 1.5);
        CHECK(std::abs(sol.c_p() - 7.5) < 1e-9);
        CHECK(std::abs(sol.beta_p() - std::cbrt(2.5)) < 1e-10);
    }
    SUBCASE("p -> 2 consistency") {
        const auto exact = RadialPotential::solve_capacitary(model, 2.0);
        for (double p : {2.0 - 1e-6, 2.0 + 1e-6}) {
            const auto sol = RadialPotential::solve_capacitary(model, p);
            double sup = 0.0;
            for (double r : log_spaced(0.5, 1e5, 60))
                sup = std::max(sup, std::abs(sol.u(r) - exact.u(r)));
            CHECK(sup < 1e-5);
        }
    }
}

TEST_CASE("conserved flux and absence of critical points across the grid") {
    const MetricModel model = MetricModel::schwarzschild(1.0, 0.5);
    for (double p : {1.1, 1.5, 2.0, 2.7}) {
        const auto sol = RadialPotential::solve_capacitary(model, p);
        double worst = 0.0, min_grad = 1e300;
        for (std::size_t i = 0; i < sol.r_nodes().size(); i += 13) {
            const double r = sol.r_nodes()[i];
            const double rho = sol.model().area_radius(r);
            const double cons =
                rho * rho * std::pow(sol.grad_norm(r), p - 1.0) / sol.flux_constant();
            worst = std::max(worst, std::abs(cons - 1.0));
            min_grad = std::min(min_grad, sol.grad_norm(r));
        }
        CHECK(worst < 1e-10);
        CHECK(min_grad > 0.0);
    }
}

TEST_CASE("beta_p ladder on Schwarzschild m = 1") {
    const MetricModel model = MetricModel::schwarzschild(1.0, 0.5);
    double prev = 2.0 + 1e-9;
    for (double p = 1.05; p < 2.91; p += 0.05) {
        const auto sol = RadialPotential::solve_capacitary(model, p);
        const double beta = sol.beta_p();
        CHECK(beta <= 2.0 + 1e-9);
        CHECK(beta <= prev + 1e-12); // nonincreasing in p
        prev = beta;
    }
    CHECK(std::abs(RadialPotential::solve_capacitary(model, 1.1).beta_p() -
                   oracles::kBeta_schw_m1_p1_1) < 1e-6);
    CHECK(std::abs(RadialPotential::solve_capacitary(model, 2.5).beta_p() -
                   oracles::kBeta_schw_m1_p2_5) < 1e-6);
    const double beta11 = RadialPotential::solve_capacitary(model, 1.1).beta_p();
    CHECK(beta11 > 1.0);
    CHECK(beta11 < 2.0);
}

TEST_CASE("domain and precondition errors") {
    CHECK_THROWS_AS(RadialPotential::solve_green(MetricModel::schwarzschild(1.0)),
                    std::domain_error); // incomplete at the pole, no exterior flag
    CHECK_THROWS_AS(
        RadialPotential::solve_capacitary(MetricModel::schwarzschild(1.0), 2.0),
        std::invalid_argument); // no inner radius
    CHECK_THROWS_AS(
        RadialPotential::solve_capacitary(MetricModel::flat(1.0), 3.0),
        std::domain_error); // p out of range
    CHECK_THROWS_AS(
        RadialPotential::solve_capacitary(MetricModel::flat(1.0), 1.0),
        std::domain_error);
    const auto cap = RadialPotential::solve_capacitary(MetricModel::flat(1.0), 1.5);
    CHECK_THROWS_AS(cap.deficit(0.5), std::domain_error); // below r0
    const auto green = RadialPotential::solve_green(MetricModel::flat());
    CHECK_THROWS_AS(green.capacity(), std::logic_error);
}

TEST_CASE("custom profile with a non-Schwarzschildian tail is rejected") {
    // phi -> 1 + 1/sqrt(r): asymptotically flat too slowly for the tail form
    std::vector<double> rs = log_spaced(1.0, 1e6, 400);
    std::vector<double> phis;
    for (double r : rs) phis.push_back(1.0 + 1.0 / std::sqrt(r));
    const MetricModel bad = MetricModel::custom(rs, phis);
    CHECK_THROWS_AS(RadialPotential::solve_green(bad), std::domain_error);
    // (custom metrics are not complete at the pole, so the green solve is
    // rejected on that ground; the capacitary solve sees the tail residual)
    MetricModel bad2 = MetricModel::custom(rs, phis, 2.0);
    CHECK_THROWS_AS(RadialPotential::solve_capacitary(bad2, 2.0), QuadratureError);
}

TEST_CASE("solution table export carries metadata and data") {
    const auto sol = RadialPotential::solve_capacitary(MetricModel::flat(1.0), 1.5);
    std::ostringstream os;
    sol.write_table(os);
    const std::string text = os.str();
    CHECK(text.find("# kind = flat") != std::string::npos);
    CHECK(text.find("# p = 1.5") != std::string::npos);
    CHECK(text.find("# Cap_p = ") != std::string::npos);
    CHECK(text.find("r,u,gradnorm\n") != std::string::npos);
}
