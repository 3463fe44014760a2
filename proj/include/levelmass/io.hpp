#pragma once
// File formats:
//   - comma-separated tables with '#'-prefixed metadata headers,
//   - raw little-endian float64 blocks with a text sidecar header
//     (L, N, pole, kind, m, a) for 3D fields,
//   - OFF meshes for extracted surfaces,
//   - structured-text run summaries (key = value lines plus one line per
//     recorded assertion).
// All numeric output uses %.17g so re-running a config reproduces every
// table byte for byte.

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "levelmass/functionals.hpp"
#include "levelmass/grid3d.hpp"
#include "levelmass/mass.hpp"

namespace levelmass {

std::string format_g17(double v);

struct AssertRecord {
    std::string name;
    bool pass = false;
    double measured = 0.0;
    double tolerance = 0.0;
    std::string note;
};

struct FieldHeader {
    double L = 0.0;
    int N = 0;
    std::array<double, 3> pole{0, 0, 0};
    std::string kind;
    double mass = 0.0;
    double smoothing_a = 0.0;
};

void write_field_block(const std::filesystem::path& base, const FieldHeader& hdr,
                       const std::vector<double>& data);
std::pair<FieldHeader, std::vector<double>> read_field_block(
    const std::filesystem::path& base);

void write_off_mesh(const std::filesystem::path& path, const ExtractedSurface& surf);

// Sweep table: t,level,F,flux,int_grad2,int_gradH,gb_deficit,grad_term,
// scalar_term,traceless_term,sphere_dev
void write_sweep_table(const std::filesystem::path& path, const MonotonicityReport& rep);

void write_penrose_table(const std::filesystem::path& path,
                         const std::vector<PenroseRow>& rows);

struct IdentityRow {
    double r;
    std::string tag;
    double lhs, rhs, relerr;
};
void write_identity_table(const std::filesystem::path& path,
                          const std::vector<IdentityRow>& rows);

void write_summary(const std::filesystem::path& path,
                   const std::vector<std::pair<std::string, std::string>>& fields,
                   const std::vector<AssertRecord>& asserts);

} // namespace levelmass
