#include "levelmass/mass.hpp"

#include <algorithm>
#include <cmath>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"

namespace levelmass {

double adm_mass_surface(const MetricModel& model, std::span<const double> radii) {
    if (radii.empty()) throw std::invalid_argument("adm_mass_surface: need radii");
    std::vector<double> inv_r, m_est;
    for (double r : radii) {
        if (!(r > 0.0)) throw std::invalid_argument("adm_mass_surface: radii must be > 0");
        const double phi = model.conformal_factor(r);
        m_est.push_back(-2.0 * r * r * phi * phi * phi * model.phi_prime(r));
        inv_r.push_back(1.0 / r);
    }
    if (m_est.size() == 1) return m_est[0];
    return fit_line(inv_r, m_est).intercept;
}

ExpansionFit fit_expansion(const RadialPotential& sol) {
    // Fit y(r) = m + b/r over the top decade, where
    //   GreenPole:   y = (1/r - (1-u)) 2 r^2
    //   Capacitary:  y = (g c_p r^{-1/g} - (1-u)) r^{2/(p-1)} 2/((3-p) c_p).
    const double r_hi = sol.r_outer();
    const double r_lo = 0.1 * r_hi;
    const auto radii = log_spaced(r_lo, r_hi, 24);
    const double p = sol.p_exponent();
    const double g = sol.gamma_p();
    const double cp = sol.c_p();
    std::vector<double> inv_r, ys;
    for (double r : radii) {
        const double deficit = sol.deficit(r);
        double y;
        if (sol.is_green()) {
            y = (1.0 / r - deficit) * 2.0 * r * r;
        } else {
            const double lead = std::exp(std::log(cp) + std::log(g) - std::log(r) / g);
            y = (lead - deficit) * std::pow(r, 2.0 / (p - 1.0)) * 2.0 / ((3.0 - p) * cp);
        }
        inv_r.push_back(1.0 / r);
        ys.push_back(y);
    }
    const LineFit fit = fit_line(inv_r, ys);
    // Residual must decay like 1/r: compare the deviation from the fitted
    // constant at the two ends of the decade.
    const double dev_lo = std::abs(ys.front() - fit.intercept);
    const double dev_hi = std::abs(ys.back() - fit.intercept);
    const double floor = 1e-10 * std::max(1.0, std::abs(fit.intercept));
    if (dev_lo > floor && dev_hi > 0.5 * dev_lo + floor)
        throw SolverError("fit_expansion: residual does not decay with radius");
    ExpansionFit out;
    out.mass_fit = fit.intercept;
    out.rms_residual = fit.rms_residual;
    return out;
}

double Ip_value(const RadialPotential& sol, double r) {
    if (sol.is_green())
        throw std::logic_error("Ip_value expects a capacitary solution");
    const double p = sol.p_exponent();
    const double g = sol.gamma_p();
    const double cp = sol.c_p();
    const double omu = sol.deficit(r);
    const double grad = sol.grad_norm(r);
    const double H = sol.model().sphere_geometry(r).mean_curv;
    const double pref = std::pow(cp, (3.0 * p - 7.0) / (3.0 - p)) *
                        std::pow(g / omu, (p - 1.0) / (3.0 - p));
    const double bracket = std::pow(cp, 3.0 - p) +
                           std::pow(g * cp / omu, 2.0) * std::pow(grad, 3.0 - p) -
                           g * cp * cp / omu * std::pow(grad, 2.0 - p) * H;
    return pref * bracket;
}

std::vector<double> Ip_profile(const RadialPotential& sol, std::span<const double> radii) {
    std::vector<double> out;
    out.reserve(radii.size());
    for (double r : radii) out.push_back(Ip_value(sol, r));
    return out;
}

double Ip_limit_expected(const RadialPotential& sol) {
    const double p = sol.p_exponent();
    return 2.0 * sol.model().mass_param() * std::pow(sol.c_p(), 1.0 - p);
}

std::vector<PenroseRow> penrose_check(const MetricModel& model,
                                      std::span<const double> p_list) {
    if (!model.inner_radius())
        throw std::invalid_argument("penrose_check: inner_radius is not set");
    const double m = model.mass_param();
    const double area = model.horizon_area();
    std::vector<PenroseRow> rows;
    rows.reserve(p_list.size());
    for (double p : p_list) {
        const RadialPotential sol = RadialPotential::solve_capacitary(model, p);
        PenroseRow row;
        row.p = p;
        row.cap_p = sol.capacity();
        row.c_p = sol.c_p();
        row.beta_p = sol.beta_p();
        row.two_m = 2.0 * m;
        row.horizon_area = area;
        row.sqrt_area_over_16pi = std::sqrt(area / (4.0 * kFourPi));
        row.beta_le_two_m = row.beta_p <= row.two_m + 1e-9;
        rows.push_back(row);
    }
    return rows;
}

MassReport mass_report(const MetricModel& model, const RadialPotential& green_sol,
                       const MonotonicityReport& sweep_report,
                       std::span<const double> adm_radii,
                       std::span<const double> p_list) {
    MassReport rep;
    rep.adm_surface = adm_mass_surface(model, adm_radii);
    rep.adm_from_F = sweep_report.limit_estimate / (2.0 * kFourPi);
    rep.adm_from_fit = fit_expansion(green_sol).mass_fit;
    const double scale = std::max(std::abs(model.mass_param()), 1.0);
    rep.consistency = std::max({std::abs(rep.adm_surface - rep.adm_from_F),
                                std::abs(rep.adm_surface - rep.adm_from_fit),
                                std::abs(rep.adm_from_F - rep.adm_from_fit)}) /
                      scale;
    if (!p_list.empty()) rep.penrose = penrose_check(model, p_list);
    return rep;
}

} // namespace levelmass
