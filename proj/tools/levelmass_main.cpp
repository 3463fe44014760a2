// levelmass command line driver.
//
// Subcommands: solve, sweep, adm, penrose, identities, fit, grid3d.
// Each takes --config PATH (one experiment per config) plus --out DIR,
// --jobs N and --tol-scale X overrides.
// Exit codes: 0 pass, 1 assertion failure, 2 usage/config error,
// 3 solver failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "levelmass/config.hpp"
#include "levelmass/errors.hpp"
#include "levelmass/runner.hpp"

namespace {

struct CliArgs {
    std::string config_path;
    std::string out_dir;
    int jobs = 1;
    double tol_scale = 1.0;
};

int run_one(const CliArgs& args, levelmass::RunMode expected, bool sweep_family) {
    levelmass::ExperimentConfig cfg = levelmass::parse_config_file(args.config_path);
    if (sweep_family) {
        if (cfg.mode != levelmass::RunMode::GreenSweep &&
            cfg.mode != levelmass::RunMode::PSweep)
            throw levelmass::ConfigError(
                "subcommand 'sweep' needs run.mode = green-sweep or p-sweep, got '" +
                to_string(cfg.mode) + "'");
    } else if (cfg.mode != expected) {
        throw levelmass::ConfigError("config run.mode '" + to_string(cfg.mode) +
                                     "' does not match the subcommand");
    }
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;

    const levelmass::RunResult res =
        levelmass::run_experiment(cfg, args.tol_scale, args.jobs);
    for (const auto& a : res.asserts)
        std::printf("%s  %s (measured = %.10g, tol = %.10g)\n",
                    a.pass ? "[pass]" : "[FAIL]", a.name.c_str(), a.measured,
                    a.tolerance);
    for (const auto& p : res.outputs) std::printf("wrote %s\n", p.string().c_str());
    return res.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"level-set monotonicity laboratory for mass inequalities"};
    app.require_subcommand(1);

    CliArgs args;
    struct Sub {
        CLI::App* cmd;
        levelmass::RunMode mode;
        bool sweep_family;
    };
    std::vector<Sub> subs;
    const auto add = [&](const char* name, const char* desc, levelmass::RunMode mode,
                         bool family = false) {
        CLI::App* c = app.add_subcommand(name, desc);
        c->add_option("--config", args.config_path, "experiment config file")
            ->required();
        c->add_option("--out", args.out_dir, "output directory override");
        c->add_option("--jobs", args.jobs, "worker threads for independent samples");
        c->add_option("--tol-scale", args.tol_scale, "assertion tolerance multiplier");
        subs.push_back({c, mode, family});
    };
    add("solve", "solve a radial potential and export its table", levelmass::RunMode::Solve);
    add("sweep", "monotonicity sweep (green-sweep or p-sweep config)",
        levelmass::RunMode::GreenSweep, true);
    add("adm", "three-way ADM mass comparison", levelmass::RunMode::Adm);
    add("penrose", "capacity/beta_p Penrose chain", levelmass::RunMode::Penrose);
    add("identities", "pointwise identity suite", levelmass::RunMode::Identities);
    add("fit", "potential expansion mass fit", levelmass::RunMode::Fit);
    add("grid3d", "3D finite-difference solve and level-surface sweep",
        levelmass::RunMode::Grid3d);

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& s : subs)
            if (s.cmd->parsed()) return run_one(args, s.mode, s.sweep_family);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const levelmass::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const levelmass::SolverError& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
