#include "levelmass/radial_potential.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"

namespace levelmass {

namespace {

RadialGrid resolve_grid(const MetricModel& model, const RadialGrid& in, double r0) {
    RadialGrid g = in;
    const double m = std::abs(model.tail_mass());
    if (g.r_max <= 0.0) g.r_max = 1e6 * std::max({m, r0, 1.0});
    if (g.r_min <= 0.0) {
        g.r_min = std::max({r0, model.smoothing_a() / 100.0, 1e-3 * m});
        if (g.r_min <= 0.0) g.r_min = 1e-3;
        if (model.kind() == MetricKind::CustomRadialConformal)
            g.r_min = std::max(g.r_min, model.profile_r_start());
    }
    if (g.n < 16) throw std::invalid_argument("radial grid: need n >= 16");
    if (!(g.r_min > 0.0 && g.r_max > g.r_min))
        throw std::invalid_argument("radial grid: need 0 < r_min < r_max");
    return g;
}

} // namespace

double RadialPotential::integrand_green(double s) const {
    const double phi = model_.conformal_factor(s);
    return 1.0 / (s * s * phi * phi);
}

double RadialPotential::integrand_cap(double s) const {
    const double phi = model_.conformal_factor(s);
    const double rho = s * phi * phi;
    return phi * phi * std::pow(rho / rho0_, -q_);
}

double RadialPotential::tail_green(double R) const {
    return 1.0 / (R + 0.5 * model_.tail_mass());
}

double RadialPotential::tail_cap(double R) const {
    // int_R^inf phi^{2-2q} s^{-q} rho0^q ds with phi = 1 + m/(2s) expanded to
    // second order; next correction is O((m/R)^3) relative.
    const double m = model_.tail_mass();
    const double A = (1.0 - q_) * m;
    const double B = (2.0 - 2.0 * q_) * (1.0 - 2.0 * q_) * m * m / 8.0;
    const double lead = std::pow(rho0_ / R, q_) * R; // rho0^q R^{1-q}
    return lead * (1.0 / (q_ - 1.0) + A / (q_ * R) + B / ((q_ + 1.0) * R * R));
}

RadialPotential RadialPotential::schwarzschild_exterior(double mass) {
    RadialSolveOptions opts;
    opts.exterior = true;
    return solve_green(MetricModel::schwarzschild(mass), opts);
}

RadialPotential RadialPotential::solve_green(const MetricModel& model,
                                             const RadialSolveOptions& opts) {
    RadialPotential sol;
    sol.problem_ = RadialProblem::GreenPole;
    sol.model_ = model;
    sol.p_ = 2.0;
    sol.q_ = 2.0;
    sol.C_ = 1.0;   // flux normalization: int |grad u| dsigma = 4 pi
    sol.c_p_ = 1.0;
    sol.quad_tol_ = opts.quad_rel_tol;

    if (opts.exterior) {
        if (model.kind() != MetricKind::SchwarzschildIsotropic)
            throw std::domain_error("exterior closed form is Schwarzschild-only");
        sol.closed_ = ClosedForm::SchwExteriorGreen;
    } else if (!model.complete_at_pole()) {
        throw std::domain_error(
            "Green's pole problem needs a metric complete at the pole "
            "(Flat or SmoothedSchwarzschild with a > 0); pass exterior=true "
            "for the Schwarzschild exterior oracle");
    } else if (model.kind() == MetricKind::Flat && !opts.force_numeric) {
        sol.closed_ = ClosedForm::FlatGreen;
    }

    if (sol.closed_ == ClosedForm::None) {
        if (model.kind() == MetricKind::CustomRadialConformal &&
            2.0 * model.tail_residual() > 1e-10)
            throw QuadratureError("custom profile tail is not Schwarzschildian; "
                                  "relative tail error exceeds 1e-10");
        sol.build_green_numeric(opts);
    } else {
        const RadialGrid g = resolve_grid(model, opts.grid, 0.0);
        sol.r_nodes_ = log_spaced(g.r_min, g.r_max, g.n);
    }
    sol.fill_tables();
    return sol;
}

RadialPotential RadialPotential::solve_capacitary(const MetricModel& model, double p,
                                                  const RadialSolveOptions& opts) {
    if (!(p > 1.0 && p < 3.0))
        throw std::domain_error("capacitary problem: need 1 < p < 3");
    if (!model.inner_radius())
        throw std::invalid_argument("capacitary problem: inner_radius is not set");

    RadialPotential sol;
    sol.problem_ = RadialProblem::Capacitary;
    sol.model_ = model;
    sol.p_ = p;
    sol.q_ = 2.0 / (p - 1.0);
    sol.r_inner_ = *model.inner_radius();
    sol.rho0_ = model.area_radius(sol.r_inner_);
    sol.quad_tol_ = opts.quad_rel_tol;

    if (!opts.force_numeric) {
        if (model.kind() == MetricKind::Flat) sol.closed_ = ClosedForm::FlatCap;
        else if (model.kind() == MetricKind::SchwarzschildIsotropic && p == 2.0)
            sol.closed_ = ClosedForm::SchwCapP2;
    }
    if (sol.closed_ == ClosedForm::None &&
        model.kind() == MetricKind::CustomRadialConformal &&
        2.0 * model.tail_residual() > 1e-10)
        throw QuadratureError("custom profile tail is not Schwarzschildian; "
                              "relative tail error exceeds 1e-10");

    switch (sol.closed_) {
        case ClosedForm::FlatCap: {
            // u = 1 - (r/r0)^{-1/gamma}, c_p = (1/gamma) r0^{1/gamma}
            const double g = (p - 1.0) / (3.0 - p);
            sol.c_p_ = std::pow(sol.r_inner_, 1.0 / g) / g;
            break;
        }
        case ClosedForm::SchwCapP2:
            // u = 1 - (r0 + m/2)/(r + m/2)
            sol.c_p_ = sol.r_inner_ + 0.5 * model.mass_param();
            break;
        default:
            sol.build_cap_numeric(opts);
            break;
    }
    sol.C_ = std::pow(sol.c_p_, p - 1.0);
    if (sol.closed_ != ClosedForm::None) {
        const RadialGrid g = resolve_grid(model, opts.grid, sol.r_inner_);
        sol.r_nodes_ = log_spaced(g.r_min, g.r_max, g.n);
    }
    sol.fill_tables();
    return sol;
}

void RadialPotential::build_green_numeric(const RadialSolveOptions& opts) {
    const RadialGrid g = resolve_grid(model_, opts.grid, 0.0);
    r_nodes_ = log_spaced(g.r_min, g.r_max, g.n);
    const std::size_t n = r_nodes_.size();
    deficit_nodes_.assign(n, 0.0);
    deficit_nodes_[n - 1] = tail_green(r_nodes_[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) {
        const double seg = integrate([this](double s) { return integrand_green(s); },
                                     r_nodes_[k], r_nodes_[k + 1], quad_tol_);
        deficit_nodes_[k] = deficit_nodes_[k + 1] + seg;
    }
}

void RadialPotential::build_cap_numeric(const RadialSolveOptions& opts) {
    const RadialGrid g = resolve_grid(model_, opts.grid, r_inner_);
    r_nodes_ = log_spaced(std::max(g.r_min, r_inner_), g.r_max, g.n);
    r_nodes_.front() = r_inner_;
    const std::size_t n = r_nodes_.size();
    // suffix integrals of the scaled integrand j = phi^2 (rho/rho0)^{-q};
    // jtot = int_{r0}^inf j, u = 1 - suffix/jtot, c_p = rho0^q... via logs.
    deficit_nodes_.assign(n, 0.0);
    deficit_nodes_[n - 1] = tail_cap(r_nodes_[n - 1]);
    for (std::size_t k = n - 1; k-- > 0;) {
        const double seg = integrate([this](double s) { return integrand_cap(s); },
                                     r_nodes_[k], r_nodes_[k + 1], quad_tol_);
        deficit_nodes_[k] = deficit_nodes_[k + 1] + seg;
    }
    jtot_ = deficit_nodes_[0];
    for (double& d : deficit_nodes_) d /= jtot_;
    // c_p = rho0^q / jtot, kept in log form for p -> 1
    const double ln_cp = q_ * std::log(rho0_) - std::log(jtot_);
    c_p_ = std::exp(ln_cp);
    if (!std::isfinite(c_p_))
        throw SolverError("capacitary normalization over/underflowed; p too close to 1");
}

void RadialPotential::fill_tables() {
    const std::size_t n = r_nodes_.size();
    u_nodes_.resize(n);
    grad_nodes_.resize(n);
    if (closed_ != ClosedForm::None) {
        deficit_nodes_.resize(n);
        for (std::size_t i = 0; i < n; ++i) deficit_nodes_[i] = deficit(r_nodes_[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        u_nodes_[i] = 1.0 - deficit_nodes_[i];
        grad_nodes_[i] = grad_norm(r_nodes_[i]);
    }
}

double RadialPotential::segment_deficit(double r) const {
    // numeric paths: deficit via suffix table plus a local segment integral
    const auto& rs = r_nodes_;
    const bool cap = problem_ == RadialProblem::Capacitary;
    auto f = [this, cap](double s) { return cap ? integrand_cap(s) : integrand_green(s); };
    const double scale = cap ? jtot_ : 1.0;

    if (r >= rs.back()) return (cap ? tail_cap(r) : tail_green(r)) / scale;
    if (r < rs.front()) {
        if (cap) throw std::domain_error("level below the capacitary boundary r0");
        // the integrand spans many decades here: substitute s = e^x
        const double seg = integrate(
            [&f](double x) {
                const double s = std::exp(x);
                return s * f(s);
            },
            std::log(r), std::log(rs.front()), quad_tol_);
        return deficit_nodes_.front() + seg; // scale = 1 for green
    }
    const auto it = std::upper_bound(rs.begin(), rs.end(), r);
    const std::size_t k = static_cast<std::size_t>(std::distance(rs.begin(), it)) - 1;
    const std::size_t hi = std::min(k + 1, rs.size() - 1);
    const double seg = (r == rs[k]) ? 0.0 : integrate(f, r, rs[hi], quad_tol_);
    return (r == rs[k]) ? deficit_nodes_[k] : deficit_nodes_[hi] + seg / scale;
}

double RadialPotential::deficit(double r) const {
    switch (closed_) {
        case ClosedForm::FlatGreen:
            if (!(r > 0.0)) throw std::domain_error("need r > 0");
            return 1.0 / r;
        case ClosedForm::SchwExteriorGreen:
            if (!(r > 0.0)) throw std::domain_error("need r > 0");
            return 1.0 / (r + 0.5 * model_.mass_param());
        case ClosedForm::FlatCap:
            if (!(r >= r_inner_)) throw std::domain_error("level below r0");
            return std::pow(r_inner_ / r, 1.0 / gamma_p());
        case ClosedForm::SchwCapP2:
            if (!(r >= r_inner_)) throw std::domain_error("level below r0");
            return c_p_ / (r + 0.5 * model_.mass_param());
        case ClosedForm::None:
            return segment_deficit(r);
    }
    return 0.0;
}

double RadialPotential::grad_norm(double r) const {
    // |grad u| = (C / rho^2)^{1/(p-1)} = c_p rho^{-q}; scaled form for p -> 1
    const double rho = model_.area_radius(r);
    if (problem_ == RadialProblem::GreenPole) return 1.0 / (rho * rho);
    if (closed_ == ClosedForm::None)
        return std::pow(rho / rho0_, -q_) / jtot_;
    return c_p_ * std::pow(rho, -q_);
}

double RadialPotential::dgrad_norm_dr(double r) const {
    const double rho = model_.area_radius(r);
    return -q_ * grad_norm(r) * model_.darea_radius_dr(r) / rho;
}

double RadialPotential::du_dr(double r) const {
    const double phi = model_.conformal_factor(r);
    return phi * phi * grad_norm(r);
}

double RadialPotential::radius_of_deficit(double d) const {
    if (!(d > 0.0)) throw std::domain_error("radius_of_deficit: need deficit > 0");
    switch (closed_) {
        case ClosedForm::FlatGreen: return 1.0 / d;
        case ClosedForm::SchwExteriorGreen: {
            const double r = 1.0 / d - 0.5 * model_.mass_param();
            if (!(r > 0.0))
                throw std::domain_error("level below the exterior chart (r <= 0)");
            return r;
        }
        case ClosedForm::FlatCap:
            if (d > 1.0) throw std::domain_error("deficit > 1: below the boundary");
            return r_inner_ * std::pow(d, -gamma_p());
        case ClosedForm::SchwCapP2:
            if (d > 1.0) throw std::domain_error("deficit > 1: below the boundary");
            return c_p_ / d - 0.5 * model_.mass_param();
        case ClosedForm::None: break;
    }
    const bool cap = problem_ == RadialProblem::Capacitary;
    if (cap && d > 1.0) throw std::domain_error("deficit > 1: below the boundary");
    if (cap && d == 1.0) return r_inner_;

    // bracket using the node table (deficit_nodes_ is strictly decreasing)
    const auto& dn = deficit_nodes_;
    double lo, hi;
    if (d >= dn.front()) {
        if (cap) return r_inner_;
        // below the table: expand a bracket toward the pole
        hi = r_nodes_.front();
        lo = hi * 0.5;
        while (deficit(lo) < d) {
            hi = lo;
            lo *= 0.5;
            if (lo < 1e-300) throw SolverError("radius_of_deficit: bracket collapse");
        }
    } else if (d <= dn.back()) {
        // beyond r_max: analytic tails are exact enough to invert directly
        if (!cap) return 1.0 / d - 0.5 * model_.tail_mass();
        lo = r_nodes_.back();
        hi = lo * 2.0;
        while (tail_cap(hi) / jtot_ > d) {
            lo = hi;
            hi *= 2.0;
            if (hi > 1e300) throw SolverError("radius_of_deficit: bracket overflow");
        }
        return find_root([this, d](double r) { return tail_cap(r) / jtot_ - d; }, lo, hi);
    } else {
        const auto it = std::lower_bound(dn.begin(), dn.end(), d, std::greater<double>());
        const std::size_t k = static_cast<std::size_t>(std::distance(dn.begin(), it));
        lo = r_nodes_[k - 1];
        hi = r_nodes_[k];
    }
    return find_root([this, d](double r) { return deficit(r) - d; }, lo, hi);
}

double RadialPotential::capacity() const {
    if (problem_ != RadialProblem::Capacitary)
        throw std::logic_error("capacity is defined for capacitary solutions");
    return kFourPi * C_;
}

double RadialPotential::beta_p() const {
    if (problem_ != RadialProblem::Capacitary)
        throw std::logic_error("beta_p is defined for capacitary solutions");
    const double g = gamma_p();
    return std::exp(g * (std::log(c_p_) + std::log(g)));
}

void RadialPotential::write_table(std::ostream& os) const {
    os << "# kind = " << to_string(model_.kind()) << "\n";
    os << std::setprecision(17);
    os << "# m = " << model_.mass_param() << "\n";
    os << "# a = " << model_.smoothing_a() << "\n";
    os << "# problem = " << (is_green() ? "green" : "capacitary") << "\n";
    os << "# p = " << p_ << "\n";
    os << "# C = " << C_ << "\n";
    if (problem_ == RadialProblem::Capacitary) {
        os << "# Cap_p = " << capacity() << "\n";
        os << "# r0 = " << r_inner_ << "\n";
    }
    os << "r,u,gradnorm\n";
    for (std::size_t i = 0; i < r_nodes_.size(); ++i)
        os << r_nodes_[i] << ',' << u_nodes_[i] << ',' << grad_nodes_[i] << "\n";
}

} // namespace levelmass
