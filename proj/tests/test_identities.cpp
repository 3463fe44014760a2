#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "levelmass/functionals.hpp"
#include "levelmass/identities.hpp"
#include "levelmass/numerics.hpp"
#include "oracles.hpp"

using namespace levelmass;

TEST_CASE("flat space: div X vanishes identically") {
    const auto sol = RadialPotential::solve_green(MetricModel::flat());
    for (double r : {0.5, 3.0, 40.0}) {
        CHECK(std::abs(divX_geometric(sol, r)) < 1e-14);
        CHECK(std::abs(divX_bochner(sol, r)) < 1e-13);
        CHECK(std::abs(divX_finite_difference(sol, r)) < 1e-10);
    }
}

TEST_CASE("Schwarzschild exterior m=2 at r=9: the closed-form value") {
    const auto sol = RadialPotential::schwarzschild_exterior(2.0);
    // |grad u| = R^Sigma/2 = 0.0081, H = 0.144, R = 0:
    // div X = 0.81 * (3/4) * 0.018^2 = 1.9683e-4
    const double expect = 0.81 * 0.75 * 0.018 * 0.018;
    CHECK(divX_geometric(sol, 9.0) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(divX_bochner(sol, 9.0) == doctest::Approx(expect).epsilon(1e-12));
    const IdentitySample s = check_divX(sol, 9.0, IdentityTag::DivX_Geometric);
    CHECK(s.relerr < 1e-8);
    CHECK(!s.flagged);
}

TEST_CASE("smoothed m=2 a=1 at r=5: frozen high-precision reference") {
    const auto sol =
        RadialPotential::solve_green(MetricModel::smoothed_schwarzschild(2.0, 1.0));
    CHECK(std::abs(sol.u(5.0) - oracles::kU_smoothed_m2_a1_r5) < 1e-13);
    CHECK(sol.model().sphere_geometry(5.0).mean_curv ==
          doctest::Approx(oracles::kH_smoothed_m2_a1_r5).epsilon(1e-14));
    CHECK(sol.model().scalar_curvature(5.0) ==
          doctest::Approx(oracles::kR_smoothed_m2_a1_r5).epsilon(1e-14));
    CHECK(divX_geometric(sol, 5.0) ==
          doctest::Approx(oracles::kDivX_smoothed_m2_a1_r5).epsilon(1e-12));
    CHECK(divX_bochner(sol, 5.0) ==
          doctest::Approx(oracles::kDivX_smoothed_m2_a1_r5).epsilon(1e-12));
    CHECK(rel_err(divX_geometric(sol, 5.0), divX_bochner(sol, 5.0)) < 1e-12);
}

TEST_CASE("both divergence routes agree at 100 log-spaced radii per model") {
    const auto check_model = [](const RadialPotential& sol) {
        double max_gb = 0.0, max_fd = 0.0;
        for (double r : log_spaced(0.1, 1e3, 100)) {
            max_gb = std::max(max_gb, rel_err(divX_geometric(sol, r), divX_bochner(sol, r)));
            max_fd = std::max(max_fd, check_divX(sol, r, IdentityTag::DivX_Geometric).relerr);
        }
        CHECK(max_gb < 1e-6);
        CHECK(max_fd < 1e-4);
    };
    check_model(RadialPotential::schwarzschild_exterior(2.0));
    check_model(RadialPotential::solve_green(MetricModel::smoothed_schwarzschild(1.0, 0.5)));
    check_model(RadialPotential::solve_green(MetricModel::smoothed_schwarzschild(2.0, 1.0)));
}

TEST_CASE("harmonic and p-harmonic mean-curvature formula") {
    SUBCASE("flat, p = 2, r = 4: both 0.5") {
        const auto sol = RadialPotential::solve_green(MetricModel::flat());
        const IdentitySample s = check_meancurv(sol, 4.0);
        CHECK(s.lhs == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(s.rhs == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(!s.flagged);
    }
    SUBCASE("Schwarzschild m=2, p=2, r=9: both 0.144") {
        const auto sol = RadialPotential::schwarzschild_exterior(2.0);
        const IdentitySample s = check_meancurv(sol, 9.0);
        CHECK(s.lhs == doctest::Approx(0.144).epsilon(1e-14));
        CHECK(s.relerr < 1e-8);
    }
    SUBCASE("Schwarzschild m=1, p=1.5, r=2") {
        const auto sol = RadialPotential::solve_capacitary(
            MetricModel::schwarzschild(1.0, 0.5), 1.5);
        const IdentitySample s = check_meancurv(sol, 2.0);
        CHECK(s.relerr < 1e-8);
    }
}

TEST_CASE("traced Gauss equation on the level spheres") {
    const auto sol =
        RadialPotential::solve_green(MetricModel::smoothed_schwarzschild(2.0, 1.0));
    for (double r : log_spaced(0.2, 1e3, 40)) {
        const IdentitySample s = check_gauss_rewrite(sol, r);
        CHECK(s.relerr < 1e-12);
    }
}

TEST_CASE("div X integrates to F(t) - F(s) between regular levels") {
    SUBCASE("smoothed m=2 a=1") {
        const auto sol = RadialPotential::solve_green(
            MetricModel::smoothed_schwarzschild(2.0, 1.0));
        const double lhs = integral_divX(sol, 2.0, 50.0);
        const double rhs = eval_F(sol, 50.0).F_value - eval_F(sol, 2.0).F_value;
        CHECK(rel_err(lhs, rhs) < 1e-8);
    }
    SUBCASE("Schwarzschild exterior: difference of the closed form") {
        const auto sol = RadialPotential::schwarzschild_exterior(1.0);
        const double lhs = integral_divX(sol, 3.0, 30.0);
        const double rhs = oracles::schw_F(1.0, 30.0) - oracles::schw_F(1.0, 3.0);
        CHECK(rel_err(lhs, rhs) < 1e-8);
    }
    SUBCASE("flat: both vanish") {
        const auto sol = RadialPotential::solve_green(MetricModel::flat());
        CHECK(std::abs(integral_divX(sol, 2.0, 50.0)) < 1e-10);
    }
}

TEST_CASE("Ricci normal component against finite differences of the metric") {
    // Ric(nu,nu) for g = phi^4 delta, checked against a finite-difference
    // second derivative route on an independent formula path
    const MetricModel model = MetricModel::smoothed_schwarzschild(2.0, 1.0);
    for (double r : {0.7, 3.0, 12.0}) {
        const double phi = model.conformal_factor(r);
        auto w = [&model](double rr) { return 2.0 * std::log(model.conformal_factor(rr)); };
        const double h = 1e-5 * r;
        const double wp = central_derivative(w, r, h);
        const double wpp =
            (w(r + h) - 2.0 * w(r) + w(r - h)) / (h * h);
        const double p2 = phi * phi;
        const double ric_fd = (-2.0 * wpp - 2.0 * wp / r) / (p2 * p2);
        CHECK(ricci_normal(model, r) == doctest::Approx(ric_fd).epsilon(1e-5));
    }
}

TEST_CASE("div X checks demand a GreenPole solution") {
    const auto cap = RadialPotential::solve_capacitary(MetricModel::flat(1.0), 2.0);
    CHECK_THROWS_AS(divX_geometric(cap, 3.0), std::logic_error);
    const auto green = RadialPotential::solve_green(MetricModel::flat());
    CHECK_THROWS_AS(check_divX(green, 3.0, IdentityTag::MeanCurvHarmonic),
                    std::invalid_argument);
}
