#include "levelmass/functionals.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"

namespace levelmass {

double kappa_p(double p) { return (5.0 - p) / (4.0 * (p - 1.0)); }

double level_deficit_of_t(const RadialPotential& sol, double t) {
    if (sol.is_green()) {
        if (!(t > 0.0)) throw std::domain_error("eval_F: need t > 0");
        return 1.0 / t;
    }
    const double g = sol.gamma_p();
    // 1 - alpha_p(t) = c_p g t^{-1/g}; guarded in logs for p near 1
    const double ln = std::log(sol.c_p()) + std::log(g) - std::log(t) / g;
    return std::exp(ln);
}

double t_lower_bound(const RadialPotential& sol) {
    return sol.is_green() ? 0.0 : sol.beta_p();
}

namespace {

LevelSetSample eval_common(const RadialPotential& sol, double t) {
    const double d = level_deficit_of_t(sol, t); // 1 - u on the level
    double r;
    if (!sol.is_green() && d >= 1.0) {
        if (d > 1.0 + 1e-12) throw std::domain_error("eval_Fp: t below beta_p");
        r = sol.r_inner();
    } else {
        r = sol.radius_of_deficit(d);
    }
    const SphereGeometry geo = sol.model().sphere_geometry(r);
    const double grad = sol.grad_norm(r);
    const double rho2 = geo.area_radius * geo.area_radius;

    LevelSetSample s;
    s.t = t;
    s.level = 1.0 - d;
    s.radius = r;
    s.flux = kFourPi * rho2 * grad;
    s.int_grad2 = kFourPi * rho2 * grad * grad;
    s.int_gradH = kFourPi * rho2 * grad * geo.mean_curv;

    // Overflow-safe radial form, grouped so the flat case is an exact zero:
    //   1 - D H + D^2/rho^2 = (1 - D/rho)^2 + D (2/rho - H),
    // with D = gamma_p rho^2 |grad u| / (1-u) (= t in the Green's case) and
    // 2/rho - H = (2/rho)(1 - rho'/phi^2) vanishing identically on flat.
    const double Drho = sol.gamma_p() * geo.area_radius * grad / d;
    const double phi = sol.model().conformal_factor(r);
    const double dev_flat = (2.0 / geo.area_radius) *
                            (1.0 - sol.model().darea_radius_dr(r) / (phi * phi));
    const double one_minus = 1.0 - Drho;
    s.F_value = kFourPi * t * (one_minus * one_minus +
                               Drho * geo.area_radius * dev_flat);

    s.derivative_terms = derivative_decomposition(sol, t);
    s.has_derivative_terms = true;
    return s;
}

} // namespace

LevelSetSample eval_F(const RadialPotential& sol, double t) {
    if (!sol.is_green())
        throw std::logic_error("eval_F expects a GreenPole solution; use eval_Fp");
    return eval_common(sol, t);
}

LevelSetSample eval_Fp(const RadialPotential& sol, double t) {
    if (sol.is_green())
        throw std::logic_error("eval_Fp expects a capacitary solution; use eval_F");
    return eval_common(sol, t);
}

DerivativeTerms derivative_decomposition(const RadialPotential& sol, double t) {
    const double d = level_deficit_of_t(sol, t);
    const double r = (!sol.is_green() && d >= 1.0) ? sol.r_inner()
                                                   : sol.radius_of_deficit(d);
    const SphereGeometry geo = sol.model().sphere_geometry(r);
    const double grad = sol.grad_norm(r);
    const double area = geo.area;

    DerivativeTerms dt;
    // Round levels: int R^Sigma/2 = (2/rho^2)/2 * 4 pi rho^2 = 4 pi exactly,
    // so the Gauss-Bonnet deficit vanishes; tangential-gradient and traceless
    // terms vanish by symmetry.
    dt.gauss_bonnet_deficit = 0.0;
    dt.grad_term = 0.0;
    dt.traceless_term = 0.0;
    dt.scalar_term = 0.5 * geo.ambient_scalar_curv * area;
    const double dev = 2.0 * sol.gamma_p() * grad / d - geo.mean_curv;
    dt.sphere_deviation = kappa_p(sol.p_exponent()) * dev * dev * area;
    return dt;
}

DerivativeCheck check_derivative(const RadialPotential& sol, double t, double dt) {
    if (dt <= 0.0) dt = 1e-4 * t;
    auto F = [&sol](double tv) {
        return sol.is_green() ? eval_F(sol, tv).F_value : eval_Fp(sol, tv).F_value;
    };
    DerivativeCheck chk;
    chk.lhs = (F(t + dt) - F(t - dt)) / (2.0 * dt);
    chk.rhs = derivative_decomposition(sol, t).sum();
    chk.relerr = rel_err(chk.lhs, chk.rhs);
    return chk;
}

std::vector<double> default_t_grid(const RadialPotential& sol, int n) {
    const double m = std::max(std::abs(sol.model().mass_param()), 1.0);
    const double t_max = 1e4 * m;
    const double t_min = sol.is_green() ? 1e-2 : sol.beta_p();
    return log_spaced(t_min, t_max, n);
}

MonotonicityReport assemble_report(std::vector<LevelSetSample> samples, double tol) {
    MonotonicityReport rep;
    rep.tolerance = tol;
    std::sort(samples.begin(), samples.end(),
              [](const LevelSetSample& a, const LevelSetSample& b) { return a.t < b.t; });
    rep.samples = std::move(samples);

    const LevelSetSample* prev = nullptr;
    for (const auto& s : rep.samples) {
        if (s.skipped) continue;
        rep.max_flux_deviation = std::max(rep.max_flux_deviation, std::abs(s.flux - kFourPi));
        if (prev && s.F_value < prev->F_value - tol)
            rep.violations.push_back({prev->t, s.t, prev->F_value, s.F_value});
        prev = &s;
    }

    // Limit by a linear fit of F against 1/t over the top decade.
    std::vector<double> xs, ys;
    double t_hi = 0.0;
    for (const auto& s : rep.samples)
        if (!s.skipped) t_hi = std::max(t_hi, s.t);
    for (const auto& s : rep.samples)
        if (!s.skipped && s.t >= 0.1 * t_hi) {
            xs.push_back(1.0 / s.t);
            ys.push_back(s.F_value);
        }
    rep.limit_estimate = xs.size() >= 2 ? fit_line(xs, ys).intercept
                                        : (ys.empty() ? 0.0 : ys.back());
    for (const auto& s : rep.samples)
        if (!s.skipped) {
            rep.initial_value = s.F_value;
            break;
        }
    return rep;
}

MonotonicityReport sweep(const RadialPotential& sol, std::span<const double> t_grid,
                         double tol, int jobs) {
    if (!std::is_sorted(t_grid.begin(), t_grid.end()))
        throw std::invalid_argument("sweep: t grid must be sorted ascending");
    std::vector<LevelSetSample> samples(t_grid.size());
    auto work = [&](std::size_t i) {
        samples[i] = sol.is_green() ? eval_F(sol, t_grid[i]) : eval_Fp(sol, t_grid[i]);
    };
    if (jobs <= 1 || t_grid.size() < 8) {
        for (std::size_t i = 0; i < t_grid.size(); ++i) work(i);
    } else {
        const int nthreads = std::min<int>(jobs, std::thread::hardware_concurrency());
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < nthreads; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < t_grid.size(); i = next++) work(i);
            });
        for (auto& th : pool) th.join();
    }
    return assemble_report(std::move(samples), tol);
}

} // namespace levelmass
