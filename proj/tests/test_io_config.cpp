#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "levelmass/config.hpp"
#include "levelmass/errors.hpp"
#include "levelmass/runner.hpp"

using namespace levelmass;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kGoodConfig = R"(
# a complete experiment description
[metric]
kind = smoothed_schwarzschild
mass = 2.0
smoothing_a = 1.0

[solver]
radial_n = 512

[run]
mode = green-sweep
t_min = 0.5
t_max = 1e4
t_count = 40

[output]
dir = OUTDIR
formats = csv,summary
)";

} // namespace

TEST_CASE("config parsing: happy path") {
    const ExperimentConfig cfg = parse_config_text(kGoodConfig, "inline");
    CHECK(cfg.kind == MetricKind::SmoothedSchwarzschild);
    CHECK(cfg.mass == 2.0);
    CHECK(cfg.smoothing_a == 1.0);
    CHECK(cfg.radial_n == 512);
    CHECK(cfg.mode == RunMode::GreenSweep);
    CHECK(cfg.t_count == 40);
    CHECK(cfg.write_csv);
    CHECK(cfg.write_summary);
    CHECK(!cfg.write_mesh);
}

TEST_CASE("config parsing: errors carry origin, line and field") {
    const auto expect_error = [](const std::string& text, const std::string& needle) {
        try {
            parse_config_text(text, "cfg");
            FAIL("expected ConfigError for: " << needle);
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("[metric]\nkind = waffle\n[run]\nmode = adm\n", "unknown kind");
    expect_error("[run]\nmode = sideways\n", "unknown run mode");
    expect_error("[metric]\nmass = two\n[run]\nmode = adm\n", "expected a number");
    expect_error("[run]\nmode = p-sweep\n", "p_list");
    expect_error("[run]\nmode = p-sweep\np_list = 2.0\n", "inner_radius");
    expect_error("[run]\nmode = penrose\np_list = 5\n", "p must lie in (1,3)");
    expect_error("mode = adm\n", "outside of any [section]");
    expect_error("[run\nmode = adm\n", "malformed section header");
    expect_error("[metric]\nkind = custom\n[run]\nmode = adm\n", "profile_path");
    expect_error("[run]\nmode = green-sweep\nspot_t = 1\nspot_F = 1,2\nspot_tol = 1\n",
                 "matching lengths");
    // line numbers are reported
    try {
        parse_config_text("[metric]\nmass = nah\n[run]\nmode = adm\n", "cfg");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("cfg:2") != std::string::npos);
    }
}

TEST_CASE("runner: deterministic byte-identical outputs") {
    const auto base = std::filesystem::temp_directory_path() / "lm_determinism";
    std::filesystem::remove_all(base);
    std::string text(kGoodConfig);
    ExperimentConfig cfg = parse_config_text(text, "inline");
    cfg.out_dir = base / "run1";
    const RunResult r1 = run_experiment(cfg);
    cfg.out_dir = base / "run2";
    const RunResult r2 = run_experiment(cfg);
    CHECK(r1.exit_code == 0);
    CHECK(r2.exit_code == 0);
    CHECK(slurp(base / "run1" / "sweep.csv") == slurp(base / "run2" / "sweep.csv"));
    CHECK(slurp(base / "run1" / "summary.txt") == slurp(base / "run2" / "summary.txt"));
    CHECK(!slurp(base / "run1" / "sweep.csv").empty());
}

TEST_CASE("sweep table carries the documented column header") {
    const auto base = std::filesystem::temp_directory_path() / "lm_columns";
    std::filesystem::remove_all(base);
    ExperimentConfig cfg = parse_config_text(kGoodConfig, "inline");
    cfg.out_dir = base;
    run_experiment(cfg);
    const std::string csv = slurp(base / "sweep.csv");
    CHECK(csv.rfind("t,level,F,flux,int_grad2,int_gradH,gb_deficit,grad_term,"
                    "scalar_term,traceless_term,sphere_dev\n",
                    0) == 0);
    const std::string summary = slurp(base / "summary.txt");
    CHECK(summary.find("mode = green-sweep") != std::string::npos);
    CHECK(summary.find("assert monotonicity_violations = pass") != std::string::npos);
    CHECK(summary.find("limit_over_8pi") != std::string::npos);
}

TEST_CASE("runner exit codes: assertion failures are nonzero, never silent") {
    // negative mass: monotonicity must fail and be visible in the summary
    const char* falsifier = R"(
[metric]
kind = smoothed_schwarzschild
mass = -0.5
smoothing_a = 0.5
[solver]
radial_n = 512
[run]
mode = green-sweep
t_count = 80
[output]
dir = unused
)";
    ExperimentConfig cfg = parse_config_text(falsifier, "inline");
    cfg.out_dir = std::filesystem::temp_directory_path() / "lm_falsifier";
    std::filesystem::remove_all(cfg.out_dir);
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 1);
    bool mono_failed = false;
    for (const auto& a : res.asserts)
        if (a.name == "monotonicity_violations" && !a.pass && a.measured > 0)
            mono_failed = true;
    CHECK(mono_failed);
    const std::string summary = slurp(cfg.out_dir / "summary.txt");
    CHECK(summary.find("assert monotonicity_violations = FAIL") != std::string::npos);
}

TEST_CASE("solve mode writes tables and checks oracle values") {
    const char* text = R"(
[metric]
kind = flat
inner_radius = 1.0
[solver]
force_numeric = true
[run]
mode = solve
p_list = 1.5, 2.0
expected_c_p = 3.0, 1.0
expected_beta = 1.0, 1.0
expected_tol = 1e-8
[output]
dir = unused
)";
    ExperimentConfig cfg = parse_config_text(text, "inline");
    cfg.out_dir = std::filesystem::temp_directory_path() / "lm_solve";
    std::filesystem::remove_all(cfg.out_dir);
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 0);
    CHECK(std::filesystem::exists(cfg.out_dir / "solution_p1.500000.csv"));
    const std::string summary = slurp(cfg.out_dir / "summary.txt");
    CHECK(summary.find("c_p_oracle = pass") != std::string::npos);
    CHECK(summary.find("beta_oracle = pass") != std::string::npos);
}

TEST_CASE("identities mode records the derivative checks") {
    const char* text = R"(
[metric]
kind = smoothed_schwarzschild
mass = 1.0
smoothing_a = 0.5
[solver]
radial_n = 1024
[run]
mode = identities
n_points = 20
deriv_points = 10
[output]
dir = unused
)";
    ExperimentConfig cfg = parse_config_text(text, "inline");
    cfg.out_dir = std::filesystem::temp_directory_path() / "lm_ident";
    std::filesystem::remove_all(cfg.out_dir);
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 0);
    const std::string summary = slurp(cfg.out_dir / "summary.txt");
    CHECK(summary.find("assert divX_geometric_vs_bochner = pass") != std::string::npos);
    CHECK(summary.find("assert derivative_identity_green = pass") != std::string::npos);
    CHECK(summary.find("assert divergence_theorem_rel = pass") != std::string::npos);
    const std::string csv = slurp(cfg.out_dir / "identities.csv");
    CHECK(csv.rfind("r,tag,lhs,rhs,relerr\n", 0) == 0);
    CHECK(csv.find("DivX_Bochner") != std::string::npos);
}

TEST_CASE("profile ingest through the config layer") {
    const auto dir = std::filesystem::temp_directory_path() / "lm_profiles";
    std::filesystem::create_directories(dir);
    const auto path = dir / "profile.csv";
    {
        std::ofstream os(path);
        os << std::setprecision(17) << "r,phi\n";
        const MetricModel src = MetricModel::smoothed_schwarzschild(1.0, 0.5);
        for (double r = 0.01, i = 0; i < 4000; ++i, r *= 1.0047)
            os << r << ',' << src.conformal_factor(r) << "\n";
    }
    const std::string text = "[metric]\nkind = custom\nprofile_path = " +
                             path.string() +
                             "\ninner_radius = 1.0\n[run]\nmode = solve\np_list = 2.0\n";
    ExperimentConfig cfg = parse_config_text(text, "inline");
    cfg.out_dir = dir / "out";
    const MetricModel model = cfg.make_model();
    CHECK(model.kind() == MetricKind::CustomRadialConformal);
    CHECK(model.tail_mass() == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("fit mode: green and capacitary templates") {
    const char* text = R"(
[metric]
kind = schwarzschild
mass = 1.0
inner_radius = 0.5
[solver]
exterior = true
[run]
mode = fit
p_list = 1.5
[output]
dir = unused
)";
    ExperimentConfig cfg = parse_config_text(text, "inline");
    cfg.out_dir = std::filesystem::temp_directory_path() / "lm_fit";
    std::filesystem::remove_all(cfg.out_dir);
    const RunResult res = run_experiment(cfg);
    CHECK(res.exit_code == 0);
    const std::string summary = slurp(cfg.out_dir / "summary.txt");
    CHECK(summary.find("p1.5_fit_mass_err = pass") != std::string::npos);
}
