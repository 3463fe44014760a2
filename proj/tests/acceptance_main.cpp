// Acceptance suite: every product-level guarantee checked at its stated
// tolerance, one pass/fail line per criterion. Radial guarantees are checked
// through the library, batch-level ones through the shipped configs (and the
// falsifiability criterion through the installed CLI binary, exit code
// included). Exits nonzero if any criterion fails.
//
// usage: acceptance <path-to-cli> <path-to-configs-dir>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>
#include <string>
#include <vector>

#include "levelmass/config.hpp"
#include "levelmass/functionals.hpp"
#include "levelmass/identities.hpp"
#include "levelmass/mass.hpp"
#include "levelmass/numerics.hpp"
#include "levelmass/radial_potential.hpp"
#include "levelmass/runner.hpp"

using namespace levelmass;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;
fs::path g_cli;
fs::path g_configs;
fs::path g_outdir;

void report(int crit, const std::string& what, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %02d: %s (%s)\n", pass ? "PASS" : "FAIL", crit,
                what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Runs a shipped config through the library runner; returns the result and
// requires every recorded assertion to pass.
RunResult run_config(const std::string& name) {
    ExperimentConfig cfg = parse_config_file(g_configs / name);
    cfg.out_dir = g_outdir / cfg.out_dir.filename();
    return run_experiment(cfg);
}

bool config_ok(const RunResult& res, std::string* why = nullptr) {
    for (const auto& a : res.asserts)
        if (!a.pass) {
            if (why)
                *why = a.name + " measured " + fmt(a.measured) + " tol " +
                       fmt(a.tolerance);
            return false;
        }
    return true;
}

// ---------------------------------------------------------------------------

void criterion_1_flat_rigidity() {
    const auto res = run_config("acceptance01_flat_rigidity.cfg");
    double maxF = 0.0;
    for (const auto& a : res.asserts)
        if (a.name == "flat_rigidity_maxF") maxF = a.measured;
    std::string why;
    const bool ok = config_ok(res, &why);
    report(1, "flat rigidity |F| < 1e-10 on 200 levels", ok,
           ok ? "max |F| = " + fmt(maxF) : why);
}

void criterion_2_flux_identity() {
    // radial: every sampled level on the built-in models
    double worst = 0.0;
    for (double m : {0.5, 1.0, 2.0}) {
        const auto sol = RadialPotential::solve_green(
            MetricModel::smoothed_schwarzschild(m, m / 2.0));
        for (double t : log_spaced(1e-2, 1e4, 200))
            worst = std::max(worst, std::abs(eval_F(sol, t).flux - kFourPi));
    }
    const bool radial_ok = worst < 1e-10;

    const auto res = run_config("acceptance02_flux_grid3d.cfg");
    double grid_rel = 1.0;
    for (const auto& a : res.asserts)
        if (a.name == "grid_flux_identity_rel") grid_rel = a.measured;
    const bool grid_ok = config_ok(res) && grid_rel <= 0.02;
    report(2, "flux identity: radial 1e-10, grid 2% at N=128",
           radial_ok && grid_ok,
           "radial dev " + fmt(worst) + ", grid rel " + fmt(grid_rel));
}

void criterion_3_monotonicity() {
    bool ok = true;
    std::string detail;
    for (const char* name :
         {"acceptance03_monotonicity_green_m05.cfg",
          "acceptance03_monotonicity_green_m1.cfg",
          "acceptance03_monotonicity_green_m2.cfg",
          "acceptance03_monotonicity_p_schw.cfg"}) {
        std::string why;
        if (!config_ok(run_config(name), &why)) {
            ok = false;
            detail = std::string(name) + ": " + why;
            break;
        }
    }
    report(3, "zero monotonicity violations at tol 1e-10", ok,
           ok ? "3 green sweeps + 4 F_p sweeps clean" : detail);
}

void criterion_4_mass_limit() {
    double worst = 0.0;
    for (double m : {0.5, 1.0, 2.0}) {
        const auto sol = RadialPotential::solve_green(
            MetricModel::smoothed_schwarzschild(m, m / 2.0));
        const auto rep = sweep(sol, log_spaced(1e-2, 1e4, 200));
        worst = std::max(worst, std::abs(rep.limit_estimate / (2.0 * kFourPi) - m) / m);
    }
    const MetricModel schw = MetricModel::schwarzschild(1.0, 0.5);
    for (double p : {1.2, 1.5, 2.0, 2.5}) {
        const auto cap = RadialPotential::solve_capacitary(schw, p);
        const auto rep = sweep(cap, log_spaced(cap.beta_p(), 1e4, 200));
        worst = std::max(worst, std::abs(rep.limit_estimate / (2.0 * kFourPi) - 1.0));
    }
    report(4, "limit/8pi within 1e-3 relative of m at t <= 1e4", worst < 1e-3,
           "worst rel err " + fmt(worst));
}

void criterion_5_derivative_identity() {
    double worst = 0.0;
    const auto ts = log_spaced(1.0, 100.0, 50);
    for (double m : {0.5, 1.0, 2.0}) {
        const auto sol = RadialPotential::solve_green(
            MetricModel::smoothed_schwarzschild(m, m / 2.0));
        for (double t : ts) worst = std::max(worst, check_derivative(sol, t).relerr);
    }
    const MetricModel schw = MetricModel::schwarzschild(1.0, 0.5);
    for (double p : {1.2, 1.5, 2.0, 2.5}) {
        const auto cap = RadialPotential::solve_capacitary(schw, p);
        for (double t : log_spaced(1.05 * cap.beta_p(), 100.0, 50))
            worst = std::max(worst, check_derivative(cap, t).relerr);
    }
    report(5, "F' decomposition vs finite differences, relerr < 1e-6 at 50 t",
           worst < 1e-6, "worst relerr " + fmt(worst));
}

void criterion_6_spot_values() {
    const auto sol = RadialPotential::schwarzschild_exterior(2.0);
    const double F10 = eval_F(sol, 10.0).F_value;
    const double F100 = eval_F(sol, 100.0).F_value;
    const double e10 = std::abs(F10 - 14.8 * kPi);
    const double e100 = std::abs(F100 - 15.88 * kPi);
    const bool ok = e10 < 1e-8 && e100 < 1e-3 * kPi;
    report(6, "F(10) = 14.8 pi (1e-8), F(100) = 15.88 pi (1e-3 pi)", ok,
           "|dF(10)| = " + fmt(e10) + ", |dF(100)| = " + fmt(e100));
}

void criterion_7_capacity_oracles() {
    RadialSolveOptions numeric;
    numeric.force_numeric = true;
    const auto cap2 =
        RadialPotential::solve_capacitary(MetricModel::flat(1.0), 2.0, numeric);
    const double cap2_err = std::abs(cap2.capacity() - kFourPi);
    double beta_err = 0.0;
    for (double p : {1.2, 1.5, 2.0, 2.5}) {
        const auto sol =
            RadialPotential::solve_capacitary(MetricModel::flat(1.0), p, numeric);
        beta_err = std::max(beta_err, std::abs(sol.beta_p() - 1.0));
    }
    const auto schw = RadialPotential::solve_capacitary(
        MetricModel::schwarzschild(1.0, 0.5), 2.0, numeric);
    const double schw_err =
        std::max(std::abs(schw.c_p() - 1.0), std::abs(schw.beta_p() - 1.0));
    std::string why;
    const bool cfg_ok = config_ok(run_config("acceptance07_capacity_flat.cfg"), &why) &&
                        config_ok(run_config("acceptance07_capacity_schw.cfg"), &why);
    const bool ok =
        cap2_err < 1e-10 && beta_err < 1e-8 && schw_err < 1e-8 && cfg_ok;
    report(7, "capacity oracles: flat Cap_2 = 4pi, beta_p = r0, schw c_2 = m", ok,
           cfg_ok ? "Cap_2 err " + fmt(cap2_err) + ", beta err " + fmt(beta_err) +
                        ", schw err " + fmt(schw_err)
                  : why);
}

void criterion_8_penrose() {
    std::string why;
    const auto res = run_config("acceptance08_penrose.cfg");
    const bool ok = config_ok(res, &why);
    std::string detail = why;
    if (ok) {
        for (const auto& a : res.asserts)
            if (a.name == "penrose_beta_le_two_m_excess")
                detail = "max beta_p - 2m = " + fmt(a.measured);
    }
    report(8, "Penrose: beta_p <= 2m, nonincreasing, area equality 1e-12", ok, detail);
}

void criterion_9_adm_three_way() {
    bool ok = true;
    double worst = 0.0;
    std::string detail;
    for (const char* name :
         {"acceptance09_adm_flat.cfg", "acceptance09_adm_schw.cfg",
          "acceptance09_adm_smoothed_m05.cfg", "acceptance09_adm_smoothed_m1.cfg",
          "acceptance09_adm_smoothed_m2.cfg"}) {
        const auto res = run_config(name);
        std::string why;
        if (!config_ok(res, &why)) {
            ok = false;
            detail = std::string(name) + ": " + why;
            break;
        }
        for (const auto& a : res.asserts)
            if (a.name == "adm_three_way_consistency")
                worst = std::max(worst, a.measured);
    }
    report(9, "ADM three-way consistency within 1e-3 max(m,1)", ok,
           ok ? "worst consistency " + fmt(worst) : detail);
}

void criterion_10_identity_suite() {
    bool ok = true;
    std::string detail;
    double worst_pair = 0.0, worst_div = 0.0;
    for (const char* name :
         {"acceptance10_identities_smoothed_m1.cfg",
          "acceptance10_identities_smoothed_m2.cfg",
          "acceptance10_identities_schw.cfg"}) {
        const auto res = run_config(name);
        std::string why;
        if (!config_ok(res, &why)) {
            ok = false;
            detail = std::string(name) + ": " + why;
            break;
        }
        for (const auto& a : res.asserts) {
            if (a.name == "divX_geometric_vs_bochner")
                worst_pair = std::max(worst_pair, a.measured);
            if (a.name.rfind("divergence_theorem", 0) == 0)
                worst_div = std::max(worst_div, a.measured);
        }
    }
    report(10, "identity suite: divX routes 1e-6 at 100 pts, int divX = dF (1e-8)",
           ok,
           ok ? "worst pair relerr " + fmt(worst_pair) + ", divergence thm " +
                    fmt(worst_div)
              : detail);
}

void criterion_11_falsifiability() {
    const fs::path out = g_outdir / "acceptance11";
    const std::string cmd = g_cli.string() + " sweep --config " +
                            (g_configs / "acceptance11_falsifiability.cfg").string() +
                            " --out " + out.string() + " > " +
                            (out.string() + ".log") + " 2>&1";
    fs::create_directories(out);
    const int rc = std::system(cmd.c_str());
    const int exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    // the summary must report the violations rather than hiding them
    std::ifstream summary(out / "summary.txt");
    bool reported = false;
    std::string line;
    while (std::getline(summary, line))
        if (line.find("assert monotonicity_violations = FAIL") != std::string::npos)
            reported = true;
    const bool ok = exit_code == 1 && reported;
    report(11, "negative mass: violations reported, CLI exit code 1", ok,
           "exit code " + std::to_string(exit_code) +
               (reported ? ", violations reported" : ", violations NOT reported"));
}

void criterion_12_grid3d() {
    std::string why;
    const auto flat = run_config("acceptance12_grid3d_flat.cfg");
    double flatF = 0.0;
    for (const auto& a : flat.asserts)
        if (a.name == "grid_flat_F_bound") flatF = a.measured;
    const bool flat_ok = config_ok(flat, &why);

    const auto sm = run_config("acceptance12_grid3d_smoothed.cfg");
    double rel = 0.0, factor = 0.0;
    for (const auto& a : sm.asserts) {
        if (a.name == "grid_vs_radial_F_rel") rel = a.measured;
        if (a.name == "grid_convergence_factor") factor = a.measured;
    }
    const bool sm_ok = config_ok(sm, &why);
    report(12, "3D grid: flat |F| bound, 5% vs radial oracle, convergence >= 2.5",
           flat_ok && sm_ok,
           (flat_ok && sm_ok)
               ? "flat max|F| " + fmt(flatF) + ", F rel " + fmt(rel) +
                     ", conv factor " + fmt(factor)
               : why);
}

} // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::fprintf(stderr, "usage: acceptance <cli-binary> <configs-dir>\n");
        return 2;
    }
    g_cli = argv[1];
    g_configs = argv[2];
    g_outdir = fs::temp_directory_path() / "levelmass_acceptance";
    fs::remove_all(g_outdir);
    fs::create_directories(g_outdir);

    criterion_1_flat_rigidity();
    criterion_2_flux_identity();
    criterion_3_monotonicity();
    criterion_4_mass_limit();
    criterion_5_derivative_identity();
    criterion_6_spot_values();
    criterion_7_capacity_oracles();
    criterion_8_penrose();
    criterion_9_adm_three_way();
    criterion_10_identity_suite();
    criterion_11_falsifiability();
    criterion_12_grid3d();

    if (g_failures == 0) {
        std::printf("acceptance: all 12 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) FAILED\n", g_failures);
    return 1;
}
