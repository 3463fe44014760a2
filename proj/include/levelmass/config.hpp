#pragma once
// Experiment configuration: one config = one experiment. Structured
// key-value text with [section] headers, parsed by a small hand-rolled
// reader; parse errors carry file, line and field names.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "levelmass/metric.hpp"

namespace levelmass {

enum class RunMode { GreenSweep, PSweep, Adm, Penrose, Identities, Fit, Grid3d, Solve };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& s);

struct ExperimentConfig {
    // [metric]
    MetricKind kind = MetricKind::Flat;
    double mass = 0.0;
    double smoothing_a = 0.0;
    std::optional<double> inner_radius;
    std::string profile_path;

    // [solver]
    int radial_n = 4096;
    double r_min = 0.0; // 0 = auto
    double r_max = 0.0; // 0 = auto
    double quad_tol = 1e-12;
    bool exterior = false;
    bool force_numeric = false; // skip closed-form shortcuts
    double box_L = 32.0;
    int box_N = 64;
    std::array<double, 3> pole{0.0, 0.0, 0.0};
    double cg_tol = 1e-9;
    int cg_max_iters = 50000;

    // [run]
    RunMode mode = RunMode::GreenSweep;
    std::vector<double> p_list;
    double t_min = 0.0; // 0 = auto (1e-2 green, beta_p capacitary)
    double t_max = 0.0; // 0 = auto (1e4 max(m,1))
    int t_count = 200;
    std::vector<double> radii;       // adm / fit / identities sampling radii
    int n_points = 100;              // identities sample count
    double mono_tol = 1e-10;         // monotonicity tolerance (radial)
    double grid3d_mono_tol = 0.0;    // 0 = auto from discretization scale
    bool compare_radial = true;      // grid3d: compare against the radial oracle
    int convergence_N = 0;           // grid3d: extra coarse solve for h-halving
    // sweep spot checks: assert |F(spot_t[i]) - spot_F[i]| <= spot_tol[i]
    std::vector<double> spot_t, spot_F, spot_tol;
    // solve-mode oracles, aligned with p_list (green solve: single entries)
    std::vector<double> expected_c_p, expected_beta, expected_cap;
    double expected_tol = 1e-8;
    // derivative-identity check within identities mode
    int deriv_points = 50;
    double deriv_tol = 1e-6;

    // [output]
    std::filesystem::path out_dir = "out";
    bool write_csv = true;
    bool write_summary = true;
    bool write_mesh = false;
    bool write_fields = false;

    MetricModel make_model() const;
};

ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

} // namespace levelmass
