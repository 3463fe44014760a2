#include "levelmass/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "levelmass/errors.hpp"
#include "levelmass/functionals.hpp"
#include "levelmass/grid3d.hpp"
#include "levelmass/identities.hpp"
#include "levelmass/mass.hpp"
#include "levelmass/numerics.hpp"
#include "levelmass/radial_potential.hpp"

namespace levelmass {

namespace {

using Fields = std::vector<std::pair<std::string, std::string>>;

struct Ctx {
    const ExperimentConfig& cfg;
    double tol_scale;
    int jobs;
    RunResult result;
    Fields fields;

    void record(const std::string& name, double measured, double tol,
                bool pass_if_le = true, const std::string& note = {}) {
        AssertRecord a;
        a.name = name;
        a.measured = measured;
        a.tolerance = tol;
        a.pass = pass_if_le ? (measured <= tol) : (measured >= tol);
        a.note = note;
        result.asserts.push_back(a);
    }

    void field(const std::string& k, double v) { fields.emplace_back(k, format_g17(v)); }
    void field(const std::string& k, const std::string& v) { fields.emplace_back(k, v); }

    std::filesystem::path out(const std::string& name) const {
        return cfg.out_dir / name;
    }
    void note_output(const std::filesystem::path& p) { result.outputs.push_back(p); }
};

RadialSolveOptions radial_opts(const ExperimentConfig& cfg) {
    RadialSolveOptions o;
    o.grid.r_min = cfg.r_min;
    o.grid.r_max = cfg.r_max;
    o.grid.n = cfg.radial_n;
    o.exterior = cfg.exterior;
    o.force_numeric = cfg.force_numeric;
    o.quad_rel_tol = cfg.quad_tol;
    return o;
}

void spot_asserts(Ctx& ctx, const RadialPotential& sol) {
    for (std::size_t i = 0; i < ctx.cfg.spot_t.size(); ++i) {
        const double t = ctx.cfg.spot_t[i];
        const double F = sol.is_green() ? eval_F(sol, t).F_value : eval_Fp(sol, t).F_value;
        std::ostringstream name;
        name << "spot_F_at_t" << t;
        ctx.record(name.str(), std::abs(F - ctx.cfg.spot_F[i]),
                   ctx.cfg.spot_tol[i] * ctx.tol_scale);
    }
}

std::vector<double> resolve_t_grid(const ExperimentConfig& cfg, const RadialPotential& sol) {
    const double m = std::max(std::abs(sol.model().mass_param()), 1.0);
    double lo = cfg.t_min > 0.0 ? cfg.t_min : (sol.is_green() ? 1e-2 : sol.beta_p());
    double hi = cfg.t_max > 0.0 ? cfg.t_max : 1e4 * m;
    if (!sol.is_green()) lo = std::max(lo, sol.beta_p());
    // the Schwarzschild exterior chart only reaches levels with t > m/2
    if (sol.is_green() && sol.model().kind() == MetricKind::SchwarzschildIsotropic)
        lo = std::max(lo, 0.55 * sol.model().mass_param());
    return log_spaced(lo, hi, cfg.t_count);
}

void sweep_asserts(Ctx& ctx, const MonotonicityReport& rep, const RadialPotential& sol,
                   const std::string& prefix) {
    const double m = sol.model().mass_param();
    ctx.record(prefix + "monotonicity_violations",
               static_cast<double>(rep.violations.size()), 0.0);
    if (sol.is_green())
        ctx.record(prefix + "flux_identity_dev", rep.max_flux_deviation,
                   1e-10 * kFourPi * ctx.tol_scale);
    if (sol.model().kind() != MetricKind::CustomRadialConformal) {
        const double scale = std::max(std::abs(m), 1.0);
        ctx.record(prefix + "mass_limit_err",
                   std::abs(rep.limit_estimate / (2.0 * kFourPi) - m),
                   1e-3 * scale * ctx.tol_scale);
    }
    if (sol.model().kind() == MetricKind::Flat) {
        double maxF = 0.0;
        for (const auto& s : rep.samples) maxF = std::max(maxF, std::abs(s.F_value));
        ctx.record(prefix + "flat_rigidity_maxF", maxF, 1e-10 * ctx.tol_scale);
    }
}

void run_green_sweep(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const RadialPotential sol = RadialPotential::solve_green(model, radial_opts(ctx.cfg));
    const auto t_grid = resolve_t_grid(ctx.cfg, sol);
    const MonotonicityReport rep =
        sweep(sol, t_grid, ctx.cfg.mono_tol * ctx.tol_scale, ctx.jobs);
    ctx.field("mode", "green-sweep");
    ctx.field("kind", to_string(model.kind()));
    ctx.field("m", model.mass_param());
    ctx.field("a", model.smoothing_a());
    ctx.field("samples", static_cast<double>(rep.samples.size()));
    ctx.field("initial_value", rep.initial_value);
    ctx.field("limit_estimate", rep.limit_estimate);
    ctx.field("limit_over_8pi", rep.limit_estimate / (2.0 * kFourPi));
    ctx.field("violations", static_cast<double>(rep.violations.size()));
    sweep_asserts(ctx, rep, sol, "");
    spot_asserts(ctx, sol);
    if (ctx.cfg.write_csv) {
        write_sweep_table(ctx.out("sweep.csv"), rep);
        ctx.note_output(ctx.out("sweep.csv"));
    }
}

void run_p_sweep(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    for (double p : ctx.cfg.p_list) {
        const RadialPotential sol =
            RadialPotential::solve_capacitary(model, p, radial_opts(ctx.cfg));
        const auto t_grid = resolve_t_grid(ctx.cfg, sol);
        const MonotonicityReport rep =
            sweep(sol, t_grid, ctx.cfg.mono_tol * ctx.tol_scale, ctx.jobs);
        std::ostringstream tag;
        tag << "p" << p << "_";
        ctx.field(tag.str() + "beta_p", sol.beta_p());
        ctx.field(tag.str() + "cap_p", sol.capacity());
        ctx.field(tag.str() + "limit_over_8pi", rep.limit_estimate / (2.0 * kFourPi));
        ctx.field(tag.str() + "violations", static_cast<double>(rep.violations.size()));
        sweep_asserts(ctx, rep, sol, tag.str());
        if (ctx.cfg.write_csv) {
            std::ostringstream name;
            name << "sweep_p" << p << ".csv";
            write_sweep_table(ctx.out(name.str()), rep);
            ctx.note_output(ctx.out(name.str()));
        }
    }
    ctx.field("mode", "p-sweep");
    ctx.field("kind", to_string(model.kind()));
    ctx.field("m", model.mass_param());
}

void run_adm(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const RadialPotential sol = RadialPotential::solve_green(model, radial_opts(ctx.cfg));
    const auto t_grid = resolve_t_grid(ctx.cfg, sol);
    const MonotonicityReport rep =
        sweep(sol, t_grid, ctx.cfg.mono_tol * ctx.tol_scale, ctx.jobs);
    std::vector<double> radii = ctx.cfg.radii;
    if (radii.empty()) radii = {1e3, 1e4};
    const MassReport mr = mass_report(model, sol, rep, radii, ctx.cfg.p_list);
    const double m = model.mass_param();
    const double scale = std::max(std::abs(m), 1.0);
    ctx.field("mode", "adm");
    ctx.field("kind", to_string(model.kind()));
    ctx.field("m", m);
    ctx.field("adm_surface", mr.adm_surface);
    ctx.field("adm_from_F", mr.adm_from_F);
    ctx.field("adm_from_fit", mr.adm_from_fit);
    ctx.field("consistency", mr.consistency);
    ctx.record("adm_three_way_consistency", mr.consistency, 1e-3 * ctx.tol_scale);
    ctx.record("adm_positivity", mr.adm_from_F, -1e-9 * ctx.tol_scale, false);
    if (model.kind() != MetricKind::CustomRadialConformal)
        ctx.record("adm_surface_err", std::abs(mr.adm_surface - m),
                   1e-3 * scale * ctx.tol_scale);
}

void run_penrose(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const auto rows = penrose_check(model, ctx.cfg.p_list);
    const double m = model.mass_param();
    ctx.field("mode", "penrose");
    ctx.field("kind", to_string(model.kind()));
    ctx.field("m", m);
    ctx.field("horizon_area", model.horizon_area());
    double max_excess = -std::numeric_limits<double>::infinity();
    double max_increase = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        max_excess = std::max(max_excess, rows[i].beta_p - rows[i].two_m);
        if (i > 0) max_increase = std::max(max_increase, rows[i].beta_p - rows[i - 1].beta_p);
    }
    ctx.record("penrose_beta_le_two_m_excess", max_excess, 1e-9 * ctx.tol_scale);
    ctx.record("penrose_beta_nonincreasing", max_increase, 1e-12 * ctx.tol_scale);
    if (model.kind() == MetricKind::SchwarzschildIsotropic) {
        const double eq = std::abs(rows.empty()
                                       ? std::sqrt(model.horizon_area() / (4.0 * kFourPi)) - m
                                       : rows[0].sqrt_area_over_16pi - m);
        ctx.record("penrose_area_equality", eq,
                   1e-12 * std::max(std::abs(m), 1.0) * ctx.tol_scale);
    }
    if (ctx.cfg.write_csv) {
        write_penrose_table(ctx.out("penrose.csv"), rows);
        ctx.note_output(ctx.out("penrose.csv"));
    }
}

void run_identities(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const RadialPotential sol = RadialPotential::solve_green(model, radial_opts(ctx.cfg));
    const double scale = std::max(std::abs(model.mass_param()), 1.0);
    const auto rs = log_spaced(0.1 * scale, 1e3 * scale, ctx.cfg.n_points);
    std::vector<IdentityRow> rows;
    double max_gb = 0.0, max_fd = 0.0, max_mc = 0.0, max_gauss = 0.0;
    for (double r : rs) {
        const double geo = divX_geometric(sol, r);
        const double boch = divX_bochner(sol, r);
        const double fd = divX_finite_difference(sol, r);
        const double e_gb = rel_err(geo, boch);
        const double e_fd = rel_err(fd, geo);
        max_gb = std::max(max_gb, e_gb);
        max_fd = std::max(max_fd, e_fd);
        rows.push_back({r, "DivX_Geometric", fd, geo, e_fd});
        rows.push_back({r, "DivX_Bochner", geo, boch, e_gb});
        const IdentitySample mc = check_meancurv(sol, r);
        max_mc = std::max(max_mc, mc.relerr);
        rows.push_back({r, to_string(mc.tag), mc.lhs, mc.rhs, mc.relerr});
        const IdentitySample ga = check_gauss_rewrite(sol, r);
        max_gauss = std::max(max_gauss, ga.relerr);
        rows.push_back({r, to_string(ga.tag), ga.lhs, ga.rhs, ga.relerr});
    }
    ctx.field("mode", "identities");
    ctx.field("kind", to_string(model.kind()));
    ctx.field("points", static_cast<double>(rs.size()));
    ctx.record("divX_geometric_vs_bochner", max_gb, 1e-6 * ctx.tol_scale);
    ctx.record("divX_vs_finite_difference", max_fd, 1e-4 * ctx.tol_scale);
    ctx.record("meancurv_identity", max_mc, 1e-8 * ctx.tol_scale);
    ctx.record("gauss_rewrite", max_gauss, 1e-10 * ctx.tol_scale);

    // derivative identity: FD F' against the decomposition formula
    const auto deriv_ts = log_spaced(1.0 * scale, 100.0 * scale, ctx.cfg.deriv_points);
    double max_deriv = 0.0;
    for (double t : deriv_ts) max_deriv = std::max(max_deriv, check_derivative(sol, t).relerr);
    ctx.record("derivative_identity_green", max_deriv, ctx.cfg.deriv_tol * ctx.tol_scale);
    for (double p : ctx.cfg.p_list) {
        const RadialPotential cap =
            RadialPotential::solve_capacitary(model, p, radial_opts(ctx.cfg));
        const auto ts = log_spaced(std::max(1.05 * cap.beta_p(), 1.0 * scale),
                                   100.0 * scale, ctx.cfg.deriv_points);
        double worst = 0.0;
        for (double t : ts) worst = std::max(worst, check_derivative(cap, t).relerr);
        std::ostringstream tag;
        tag << "derivative_identity_p" << p;
        ctx.record(tag.str(), worst, ctx.cfg.deriv_tol * ctx.tol_scale);
    }

    // divergence-theorem consistency between two regular levels
    const double s_lvl = 2.0, t_lvl = 50.0;
    const double lhs = integral_divX(sol, s_lvl, t_lvl);
    const double rhs = eval_F(sol, t_lvl).F_value - eval_F(sol, s_lvl).F_value;
    const double denom = std::max(std::abs(rhs), 1e-300);
    ctx.field("int_divX", lhs);
    ctx.field("F_t_minus_F_s", rhs);
    const double tol = model.kind() == MetricKind::Flat ? 1e-10 : 1e-8 * ctx.tol_scale;
    if (model.kind() == MetricKind::Flat)
        ctx.record("divergence_theorem_abs", std::abs(lhs - rhs), tol);
    else
        ctx.record("divergence_theorem_rel", std::abs(lhs - rhs) / denom, tol);
    if (ctx.cfg.write_csv) {
        write_identity_table(ctx.out("identities.csv"), rows);
        ctx.note_output(ctx.out("identities.csv"));
    }
}

void run_fit(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const double m = model.mass_param();
    const double scale = std::max(std::abs(m), 1.0);
    ctx.field("mode", "fit");
    ctx.field("kind", to_string(model.kind()));
    if (ctx.cfg.p_list.empty()) {
        const RadialPotential sol =
            RadialPotential::solve_green(model, radial_opts(ctx.cfg));
        const ExpansionFit fit = fit_expansion(sol);
        ctx.field("mass_fit", fit.mass_fit);
        ctx.record("fit_mass_err", std::abs(fit.mass_fit - m), 1e-3 * scale * ctx.tol_scale);
    } else {
        for (double p : ctx.cfg.p_list) {
            const RadialPotential sol =
                RadialPotential::solve_capacitary(model, p, radial_opts(ctx.cfg));
            const ExpansionFit fit = fit_expansion(sol);
            std::ostringstream tag;
            tag << "p" << p << "_";
            ctx.field(tag.str() + "mass_fit", fit.mass_fit);
            ctx.record(tag.str() + "fit_mass_err", std::abs(fit.mass_fit - m),
                       1e-3 * scale * ctx.tol_scale);
        }
    }
}

void run_grid3d(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const RadialPotential radial = RadialPotential::solve_green(model, radial_opts(ctx.cfg));
    GridOptions gopts;
    gopts.L = ctx.cfg.box_L;
    gopts.N = ctx.cfg.box_N;
    gopts.pole = ctx.cfg.pole;
    gopts.cg_tol = ctx.cfg.cg_tol;
    gopts.cg_max_iters = ctx.cfg.cg_max_iters;
    const Solution3D sol = solve_green_3d(model, gopts, radial);

    const double m = model.mass_param();
    const double lo = ctx.cfg.t_min > 0 ? ctx.cfg.t_min : 5.0;
    const double hi = ctx.cfg.t_max > 0 ? ctx.cfg.t_max : 20.0;
    const auto t_grid = log_spaced(lo, hi, std::min(ctx.cfg.t_count, 16));
    const double tol3d = ctx.cfg.grid3d_mono_tol > 0
                             ? ctx.cfg.grid3d_mono_tol
                             : 0.02 * 2.0 * kFourPi * std::max(std::abs(m), 1.0);
    const MonotonicityReport rep = sweep_3d(sol, t_grid, tol3d * ctx.tol_scale);

    ctx.field("mode", "grid3d");
    ctx.field("kind", to_string(model.kind()));
    ctx.field("m", m);
    ctx.field("box_L", gopts.L);
    ctx.field("box_N", static_cast<double>(gopts.N));
    ctx.field("cg_iterations", static_cast<double>(sol.iterations()));
    ctx.field("cg_residual", sol.residual());

    double max_flux_rel = 0.0, maxF = 0.0;
    int used = 0;
    for (const auto& s : rep.samples) {
        if (s.skipped) continue;
        ++used;
        max_flux_rel = std::max(max_flux_rel, std::abs(s.flux - kFourPi) / kFourPi);
        maxF = std::max(maxF, std::abs(s.F_value));
    }
    ctx.field("levels_used", static_cast<double>(used));
    ctx.record("grid_flux_identity_rel", max_flux_rel, 0.02 * ctx.tol_scale);
    ctx.record("grid_monotonicity_violation_drop",
               rep.violations.empty()
                   ? 0.0
                   : std::max_element(rep.violations.begin(), rep.violations.end(),
                                      [](const Violation& a, const Violation& b) {
                                          return a.drop() < b.drop();
                                      })->drop(),
               tol3d * ctx.tol_scale);
    if (model.kind() == MetricKind::Flat) {
        ctx.record("grid_flat_F_bound", maxF, 0.05 * 2.0 * kFourPi * ctx.tol_scale);
    } else if (ctx.cfg.compare_radial) {
        double max_rel = 0.0;
        for (const auto& s : rep.samples) {
            if (s.skipped) continue;
            const double Fr = eval_F(radial, s.t).F_value;
            max_rel = std::max(max_rel, std::abs(s.F_value - Fr) / std::max(std::abs(Fr), 1e-300));
        }
        ctx.record("grid_vs_radial_F_rel", max_rel, 0.05 * ctx.tol_scale);
    }

    if (ctx.cfg.convergence_N > 0 && model.kind() != MetricKind::Flat) {
        GridOptions coarse = gopts;
        coarse.N = ctx.cfg.convergence_N;
        const Solution3D sol_c = solve_green_3d(model, coarse, radial);
        const double t_ref = std::sqrt(lo * hi);
        const double Fr = eval_F(radial, t_ref).F_value;
        const double e_fine = std::abs(eval_F_3d(sol, t_ref).F_value - Fr);
        const double e_coarse = std::abs(eval_F_3d(sol_c, t_ref).F_value - Fr);
        ctx.field("conv_t_ref", t_ref);
        ctx.field("conv_err_coarse", e_coarse);
        ctx.field("conv_err_fine", e_fine);
        ctx.record("grid_convergence_factor", e_coarse / std::max(e_fine, 1e-300),
                   2.5, false);
    }

    if (ctx.cfg.write_csv) {
        write_sweep_table(ctx.out("sweep3d.csv"), rep);
        ctx.note_output(ctx.out("sweep3d.csv"));
    }
    if (ctx.cfg.write_mesh) {
        const double t_mid = std::sqrt(lo * hi);
        const ExtractedSurface surf = extract_level_surface(sol, 1.0 - 1.0 / t_mid);
        write_off_mesh(ctx.out("surface.off"), surf);
        ctx.note_output(ctx.out("surface.off"));
    }
    if (ctx.cfg.write_fields) {
        FieldHeader hdr;
        hdr.L = gopts.L;
        hdr.N = gopts.N;
        hdr.pole = gopts.pole;
        hdr.kind = to_string(model.kind());
        hdr.mass = m;
        hdr.smoothing_a = model.smoothing_a();
        write_field_block(ctx.out("u_field"), hdr, sol.u());
        ctx.note_output(ctx.out("u_field.f64"));
    }
}

void run_solve(Ctx& ctx) {
    const MetricModel model = ctx.cfg.make_model();
    const bool cap = !ctx.cfg.p_list.empty() && model.inner_radius().has_value();
    const double etol = ctx.cfg.expected_tol * ctx.tol_scale;
    std::vector<RadialPotential> sols;
    if (cap) {
        for (double p : ctx.cfg.p_list)
            sols.push_back(RadialPotential::solve_capacitary(model, p, radial_opts(ctx.cfg)));
    } else {
        sols.push_back(RadialPotential::solve_green(model, radial_opts(ctx.cfg)));
    }
    ctx.field("mode", "solve");
    ctx.field("kind", to_string(model.kind()));
    for (std::size_t i = 0; i < sols.size(); ++i) {
        const RadialPotential& sol = sols[i];
        std::ostringstream tag;
        if (!sol.is_green()) tag << "p" << sol.p_exponent() << "_";
        ctx.field(tag.str() + "problem", sol.is_green() ? "green" : "capacitary");
        ctx.field(tag.str() + "C", sol.flux_constant());
        if (!sol.is_green()) {
            ctx.field(tag.str() + "cap_p", sol.capacity());
            ctx.field(tag.str() + "c_p", sol.c_p());
            ctx.field(tag.str() + "beta_p", sol.beta_p());
            if (i < ctx.cfg.expected_c_p.size())
                ctx.record(tag.str() + "c_p_oracle",
                           std::abs(sol.c_p() - ctx.cfg.expected_c_p[i]), etol);
            if (i < ctx.cfg.expected_beta.size())
                ctx.record(tag.str() + "beta_oracle",
                           std::abs(sol.beta_p() - ctx.cfg.expected_beta[i]), etol);
            if (i < ctx.cfg.expected_cap.size())
                ctx.record(tag.str() + "cap_oracle",
                           std::abs(sol.capacity() - ctx.cfg.expected_cap[i]), etol);
        }
        if (ctx.cfg.write_csv) {
            std::ostringstream name;
            name << "solution" << (sol.is_green() ? "" : ("_p" + std::to_string(sol.p_exponent())))
                 << ".csv";
            std::filesystem::create_directories(ctx.cfg.out_dir);
            std::ofstream os(ctx.out(name.str()));
            sol.write_table(os);
            ctx.note_output(ctx.out(name.str()));
        }
    }
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg, double tol_scale, int jobs) {
    Ctx ctx{cfg, tol_scale, std::max(1, jobs), {}, {}};
    switch (cfg.mode) {
        case RunMode::GreenSweep: run_green_sweep(ctx); break;
        case RunMode::PSweep: run_p_sweep(ctx); break;
        case RunMode::Adm: run_adm(ctx); break;
        case RunMode::Penrose: run_penrose(ctx); break;
        case RunMode::Identities: run_identities(ctx); break;
        case RunMode::Fit: run_fit(ctx); break;
        case RunMode::Grid3d: run_grid3d(ctx); break;
        case RunMode::Solve: run_solve(ctx); break;
    }
    ctx.result.exit_code = ctx.result.all_pass() ? 0 : 1;
    if (cfg.write_summary) {
        write_summary(ctx.out("summary.txt"), ctx.fields, ctx.result.asserts);
        ctx.result.outputs.push_back(ctx.out("summary.txt"));
    }
    return ctx.result;
}

} // namespace levelmass
