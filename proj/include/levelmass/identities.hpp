#pragma once
// Pointwise verification of the differential identities behind the
// monotonicity proof, specialized to the radial family where they collapse
// to scalar identities with provable tolerances.
//
// The vector field
//   X = grad u/(1-u) + grad|grad u|/(1-u)^2 + |grad u| grad u/(1-u)^3
// has two closed divergence expressions (a Bochner-based one and one adapted
// to the level sets); both are checked against each other and against a
// finite-difference divergence of the assembled radial field. The harmonic
// (p-harmonic) mean-curvature formula H = -kappa Hess u(nu,nu)/|grad u| and
// the traced Gauss equation are checked the same way, and div X integrates
// between levels to F(t) - F(s).

#include <span>
#include <string>
#include <vector>

#include "levelmass/radial_potential.hpp"

namespace levelmass {

enum class IdentityTag { DivX_Bochner, DivX_Geometric, MeanCurvHarmonic, GaussRewrite };

std::string to_string(IdentityTag tag);

struct IdentitySample {
    double r = 0.0;
    IdentityTag tag = IdentityTag::DivX_Geometric;
    double lhs = 0.0;
    double rhs = 0.0;
    double relerr = 0.0;
    bool flagged = false; // relerr above the tolerance it was checked at
};

// Closed evaluations (GreenPole radial solutions).
double divX_geometric(const RadialPotential& sol, double r);
double divX_bochner(const RadialPotential& sol, double r);
// div X by Richardson-verified finite differences of the assembled field.
double divX_finite_difference(const RadialPotential& sol, double r);

// lhs = finite-difference div X, rhs = the tagged closed expression.
IdentitySample check_divX(const RadialPotential& sol, double r, IdentityTag tag,
                          double tol = 1e-4);
// lhs = geometric H from the metric, rhs = -kappa Hess u(nu,nu)/|grad u| with
// kappa = 1 (harmonic) or p-1 (p-harmonic), Hessian from the solver profile.
IdentitySample check_meancurv(const RadialPotential& sol, double r, double tol = 1e-8);
// Traced Gauss equation in the radial form
//   |h|^2 + Ric(nu,nu) = |h0|^2/2 + (3/4) H^2 + (R - R^Sigma)/2.
IdentitySample check_gauss_rewrite(const RadialPotential& sol, double r,
                                   double tol = 1e-10);

// int div(X) dmu over {1-1/s < u < 1-1/t} by radial quadrature; equals
// F(t) - F(s) for regular sweeps.
double integral_divX(const RadialPotential& sol, double s, double t);

// Radial Ricci in the normal direction, Ric(nu,nu), for conformally flat
// metrics (exposed for tests).
double ricci_normal(const MetricModel& model, double r);

} // namespace levelmass
