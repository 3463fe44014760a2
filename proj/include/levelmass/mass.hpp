#pragma once
// ADM mass three ways and the Penrose chain.
//
//   adm_surface : the coordinate flux integral, reduced analytically for
//                 conformal metrics g = phi^4 delta to m(r) = -2 r^2 phi^3 phi',
//                 extrapolated linearly in 1/r;
//   adm_from_F  : limit_estimate / 8 pi from a monotonicity sweep;
//   adm_from_fit: the 1/(2 r^2) coefficient of the potential expansion
//                 u = 1 - 1/r + m/(2 r^2) + ... (p-harmonic analogue for
//                 capacitary solutions).
//
// The Penrose side: beta_p = (c_p (p-1)/(3-p))^{(p-1)/(3-p)} <= 2m for every
// p in (1,3), the p -> 1 endpoint closing the chain at m >= sqrt(|dM|/16 pi)
// (equality on Schwarzschild, where |dM| = 16 pi m^2).

#include <span>
#include <vector>

#include "levelmass/functionals.hpp"
#include "levelmass/radial_potential.hpp"

namespace levelmass {

double adm_mass_surface(const MetricModel& model, std::span<const double> radii);

struct ExpansionFit {
    double mass_fit = 0.0;
    double rms_residual = 0.0;
};
// Least-squares fit over the top decade of the solved range; throws
// SolverError if the residual does not decay with radius.
ExpansionFit fit_expansion(const RadialPotential& sol);

// I_p along the level flow; converges to 2 m c_p^{1-p} at infinity.
double Ip_value(const RadialPotential& sol, double r);
std::vector<double> Ip_profile(const RadialPotential& sol, std::span<const double> radii);
double Ip_limit_expected(const RadialPotential& sol); // 2 m c_p^{1-p}

struct PenroseRow {
    double p = 0.0;
    double cap_p = 0.0;
    double c_p = 0.0;
    double beta_p = 0.0;
    double two_m = 0.0;
    double horizon_area = 0.0;
    double sqrt_area_over_16pi = 0.0;
    bool beta_le_two_m = false;
};
std::vector<PenroseRow> penrose_check(const MetricModel& model,
                                      std::span<const double> p_list);

struct MassReport {
    double adm_surface = 0.0;
    double adm_from_F = 0.0;
    double adm_from_fit = 0.0;
    double consistency = 0.0; // max pairwise |difference| / max(m, 1)
    std::vector<PenroseRow> penrose;
};

// Assembles the three-way report from a Green's solution (sweep included).
MassReport mass_report(const MetricModel& model, const RadialPotential& green_sol,
                       const MonotonicityReport& sweep_report,
                       std::span<const double> adm_radii,
                       std::span<const double> p_list = {});

} // namespace levelmass
