#pragma once
// The monotone level-set functionals.
//
// Along the level sets of a Green's-function potential u on a metric with
// nonnegative scalar curvature,
//   F(t)  = 4 pi t - t^2 int |grad u| H dsigma + t^3 int |grad u|^2 dsigma
// is nondecreasing, vanishes at the pole and tends to 8 pi m at infinity.
// The p-harmonic analogue F_p uses the level parametrization alpha_p(t) and
// the capacity normalization c_p. Both cases reduce, on the radial family,
// to the overflow-safe form
//   F = 4 pi t (1 - D H + D^2 / rho^2),   D = gamma_p rho^2 |grad u|/(1-u),
// with gamma_p = (p-1)/(3-p) (gamma_2 = 1, recovering D = t for the
// Green's case by the flux normalization).
//
// The derivative decomposes into nonnegative surface terms,
//   F'(t) = [4 pi - int R^Sigma/2] + int [ |grad^Sigma|grad u||^2/|grad u|^2
//           + R/2 + |h0|^2/2 + kappa_p (2 gamma_p |grad u|/(1-u) - H)^2 ],
// kappa_p = (5-p)/(4(p-1)). On radial levels the Gauss-Bonnet deficit, the
// tangential-gradient and the traceless terms vanish identically.

#include <span>
#include <string>
#include <vector>

#include "levelmass/radial_potential.hpp"

namespace levelmass {

struct DerivativeTerms {
    double gauss_bonnet_deficit = 0.0; // 4 pi - int R^Sigma/2 dsigma
    double grad_term = 0.0;            // int |grad^S |grad u||^2 / |grad u|^2
    double scalar_term = 0.0;          // int R/2 dsigma
    double traceless_term = 0.0;       // int |h0|^2/2 dsigma
    double sphere_deviation = 0.0;     // int kappa_p (2 g_p |grad u|/(1-u) - H)^2
    double sum() const {
        return gauss_bonnet_deficit + grad_term + scalar_term + traceless_term +
               sphere_deviation;
    }
};

struct LevelSetSample {
    double t = 0.0;
    double level = 0.0;      // tau = 1 - 1/t, or alpha_p(t)
    double radius = 0.0;     // radial solutions: coordinate radius of the level
    double flux = 0.0;       // int |grad u| dsigma
    double int_grad2 = 0.0;  // int |grad u|^2 dsigma
    double int_gradH = 0.0;  // int |grad u| H dsigma
    double F_value = 0.0;
    DerivativeTerms derivative_terms;
    bool has_derivative_terms = false;
    bool skipped = false;
    std::string skip_reason;
};

struct Violation {
    double t_lo = 0.0, t_hi = 0.0;
    double F_lo = 0.0, F_hi = 0.0;
    double drop() const { return F_lo - F_hi; }
};

struct MonotonicityReport {
    std::vector<LevelSetSample> samples;
    std::vector<Violation> violations;
    double tolerance = 1e-10;
    double limit_estimate = 0.0; // F(inf) from the 1/t fit on the top decade
    double initial_value = 0.0;  // F at the smallest t
    double max_flux_deviation = 0.0; // max |flux - 4 pi| over samples (Green)
};

double kappa_p(double p); // (5-p)/(4(p-1)); 3/4 at p = 2

// Level parameter of the F_p domain: alpha_p(t) = 1 - c_p g_p t^{-1/g_p};
// for the Green's case alpha(t) = 1 - 1/t. Deficit form (1 - alpha).
double level_deficit_of_t(const RadialPotential& sol, double t);
double t_lower_bound(const RadialPotential& sol); // beta_p, or 0 for Green

LevelSetSample eval_F(const RadialPotential& sol, double t);  // GreenPole
LevelSetSample eval_Fp(const RadialPotential& sol, double t); // Capacitary

DerivativeTerms derivative_decomposition(const RadialPotential& sol, double t);

struct DerivativeCheck {
    double lhs = 0.0;    // central-difference F'
    double rhs = 0.0;    // sum of decomposition terms
    double relerr = 0.0; // |lhs-rhs| / max(|lhs|,|rhs|), 0 when both vanish
};
DerivativeCheck check_derivative(const RadialPotential& sol, double t, double dt = 0.0);

std::vector<double> default_t_grid(const RadialPotential& sol, int n = 200);

MonotonicityReport sweep(const RadialPotential& sol, std::span<const double> t_grid,
                         double tol = 1e-10, int jobs = 1);

// Report assembly shared by radial and grid sweeps.
MonotonicityReport assemble_report(std::vector<LevelSetSample> samples, double tol);

} // namespace levelmass
