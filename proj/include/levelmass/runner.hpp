#pragma once
// Batch experiment driver: runs one configured experiment, writes report
// files, and records every asserted invariant with its measured value.
// Deterministic for a fixed config; exit status 0 only when every recorded
// assertion holds.

#include <filesystem>
#include <vector>

#include "levelmass/config.hpp"
#include "levelmass/io.hpp"

namespace levelmass {

struct RunResult {
    std::vector<AssertRecord> asserts;
    std::vector<std::filesystem::path> outputs;
    int exit_code = 0; // 0 pass, 1 assertion failure

    bool all_pass() const {
        for (const auto& a : asserts)
            if (!a.pass) return false;
        return true;
    }
};

// tol_scale multiplies every assertion tolerance (exploration aid);
// jobs bounds the worker threads used for independent samples.
RunResult run_experiment(const ExperimentConfig& cfg, double tol_scale = 1.0,
                         int jobs = 1);

} // namespace levelmass
