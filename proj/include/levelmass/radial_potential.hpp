#pragma once
// Radial harmonic Green's-function and p-harmonic capacitary potentials on
// conformally flat radial metrics, solved by conserved-flux quadrature.
//
// Both problems reduce to one conserved quantity along the flow:
//     rho^2 |grad u|^(p-1)  =  C   (p = 2 for the Green's case),
// so |grad u| is known in closed form once C is, and u itself is a single
// cumulative integral
//     GreenPole:   u(r) = 1 - int_r^inf ds / (s^2 phi^2)          (C = 1)
//     Capacitary:  u(r) = c_p int_{r0}^r phi^2 rho^{-2/(p-1)} ds,
// with c_p = C^{1/(p-1)} fixed by u(inf) = 1. Integrals are evaluated with
// adaptive Gauss-Kronrod refinement per log-spaced segment plus an analytic
// Schwarzschildian tail beyond r_max, so u is smooth (no interpolation
// kinks) and accurate to ~1e-13 relative everywhere.
//
// Exact Schwarzschild-exterior and flat potentials are exposed behind an
// explicit flag / factory. They are oracles for testing, not instances of
// the complete-manifold pole problem.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "levelmass/metric.hpp"

namespace levelmass {

enum class RadialProblem { GreenPole, Capacitary };

struct RadialGrid {
    double r_min = 0.0; // 0 = pick from the model
    double r_max = 0.0; // 0 = 1e6 * max(tail mass, r0, 1)
    int n = 4096;
};

struct RadialSolveOptions {
    RadialGrid grid;
    // Schwarzschild exterior closed form for the Green's problem (oracle).
    bool exterior = false;
    // Skip closed-form shortcuts even where exact ones exist (testing).
    bool force_numeric = false;
    double quad_rel_tol = 1e-12;
};

class RadialPotential {
public:
    static RadialPotential solve_green(const MetricModel& model,
                                       const RadialSolveOptions& opts = {});
    static RadialPotential solve_capacitary(const MetricModel& model, double p,
                                            const RadialSolveOptions& opts = {});
    // Convenience for the exterior oracle.
    static RadialPotential schwarzschild_exterior(double mass);

    RadialProblem problem() const { return problem_; }
    bool is_green() const { return problem_ == RadialProblem::GreenPole; }
    double p_exponent() const { return p_; }
    const MetricModel& model() const { return model_; }

    // Conserved quantities and capacity data.
    double flux_constant() const { return C_; }     // rho^2 |grad u|^{p-1}
    double capacity() const;                        // Cap_p = 4 pi C (capacitary)
    double c_p() const { return c_p_; }             // (Cap_p / 4pi)^{1/(p-1)}
    double gamma_p() const { return (p_ - 1.0) / (3.0 - p_); }
    double beta_p() const;                          // (c_p (p-1)/(3-p))^{(p-1)/(3-p)}

    // Pointwise evaluation. u is strictly increasing; deficit(r) = 1 - u(r)
    // is computed directly (no cancellation) and is the preferred form.
    double u(double r) const { return 1.0 - deficit(r); }
    double deficit(double r) const;
    double grad_norm(double r) const;               // |grad u|_g (metric norm)
    double dgrad_norm_dr(double r) const;
    double du_dr(double r) const;                   // coordinate derivative
    // Inverts u: radius of the level {u = 1 - d} given the deficit d > 0.
    double radius_of_deficit(double d) const;
    double radius_of_level(double tau) const { return radius_of_deficit(1.0 - tau); }

    // Smallest/largest radius the solution covers (capacitary: r0).
    double r_inner() const { return r_inner_; }
    double r_outer() const { return r_nodes_.empty() ? 0.0 : r_nodes_.back(); }

    std::span<const double> r_nodes() const { return r_nodes_; }
    std::span<const double> u_nodes() const { return u_nodes_; }
    std::span<const double> grad_nodes() const { return grad_nodes_; }

    // Tabular export: metadata header then "r,u,gradnorm" rows.
    void write_table(std::ostream& os) const;

private:
    enum class ClosedForm { None, FlatGreen, SchwExteriorGreen, FlatCap, SchwCapP2 };

    RadialPotential() = default;
    void build_green_numeric(const RadialSolveOptions& opts);
    void build_cap_numeric(const RadialSolveOptions& opts);
    void fill_tables();
    double segment_deficit(double r) const; // numeric paths
    double integrand_green(double s) const; // 1/(s^2 phi^2)
    double integrand_cap(double s) const;   // phi^2 (rho/rho0)^{-q}
    double tail_green(double R) const;
    double tail_cap(double R) const;

    RadialProblem problem_ = RadialProblem::GreenPole;
    ClosedForm closed_ = ClosedForm::None;
    MetricModel model_ = MetricModel::flat();
    double p_ = 2.0;
    double q_ = 2.0;       // 2/(p-1)
    double C_ = 1.0;
    double c_p_ = 1.0;
    double r_inner_ = 0.0; // capacitary boundary r0 (0 for pole problems)
    double rho0_ = 1.0;    // rho(r0), the capacitary scaling radius
    double jtot_ = 1.0;    // scaled normalization integral (capacitary)
    double quad_tol_ = 1e-12;

    std::vector<double> r_nodes_;
    std::vector<double> u_nodes_;
    std::vector<double> grad_nodes_;
    std::vector<double> deficit_nodes_; // suffix sums: 1 - u at the nodes
};

} // namespace levelmass
