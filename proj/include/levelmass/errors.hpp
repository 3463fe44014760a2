#pragma once
#include <stdexcept>
#include <string>

namespace levelmass {

// Exit-code contract of the CLI: 0 pass, 1 assertion failure,
// 2 usage/config error, 3 solver failure.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct QuadratureError : SolverError {
    using SolverError::SolverError;
};

struct DegenerateLevelError : SolverError {
    using SolverError::SolverError;
};

} // namespace levelmass
