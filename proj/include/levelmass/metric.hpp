#pragma once
// Rotationally symmetric, conformally flat asymptotically flat 3-metrics
//   g = phi(r)^4 * (flat),   phi -> 1 at infinity,
// together with the pointwise geometry every other module consumes: area
// radius, sphere areas, mean curvature of coordinate spheres, and scalar
// curvature via the conformal transformation law R = -8 phi^-5 lap_flat(phi).
//
// Built-in profiles:
//   Flat                    phi = 1
//   SchwarzschildIsotropic  phi = 1 + m/(2r)          (horizon at r0 = m/2)
//   SmoothedSchwarzschild   phi = 1 + m/(2 sqrt(r^2+a^2))  (complete, R >= 0)
//   CustomRadialConformal   phi from a sampled (r, phi) table
// All quantities in geometric units (G = c = 1).

#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "levelmass/pchip.hpp"

namespace levelmass {

enum class MetricKind {
    Flat,
    SchwarzschildIsotropic,
    SmoothedSchwarzschild,
    CustomRadialConformal,
};

std::string to_string(MetricKind kind);

struct SphereGeometry {
    double coord_radius = 0.0;          // r
    double area_radius = 0.0;           // rho = r phi^2
    double area = 0.0;                  // 4 pi rho^2
    double mean_curv = 0.0;             // H wrt the infinity-pointing normal
    double intrinsic_scalar_curv = 0.0; // R^Sigma = 2/rho^2
    double ambient_scalar_curv = 0.0;   // R at radius r
};

class MetricModel {
public:
    static MetricModel flat(std::optional<double> inner_radius = std::nullopt);
    static MetricModel schwarzschild(double mass,
                                     std::optional<double> inner_radius = std::nullopt);
    static MetricModel smoothed_schwarzschild(double mass, double a,
                                              std::optional<double> inner_radius = std::nullopt);
    // Sampled profile, strictly increasing r. Derivatives come from the
    // monotone cubic interpolant.
    static MetricModel custom(std::vector<double> r, std::vector<double> phi,
                              std::optional<double> inner_radius = std::nullopt);
    // Two-column tabular text with header line "r,phi".
    static MetricModel custom_from_file(const std::filesystem::path& path,
                                        std::optional<double> inner_radius = std::nullopt);

    MetricKind kind() const { return kind_; }
    double mass_param() const { return mass_; }
    double smoothing_a() const { return a_; }
    std::optional<double> inner_radius() const { return inner_radius_; }
    void set_inner_radius(double r0);

    double conformal_factor(double r) const;   // phi(r)
    double phi_prime(double r) const;          // d phi / dr
    double phi_second(double r) const;         // d^2 phi / dr^2
    double scalar_curvature(double r) const;   // R(r)
    double area_radius(double r) const;        // rho = r phi^2
    double darea_radius_dr(double r) const;    // d rho / dr
    SphereGeometry sphere_geometry(double r) const;
    double horizon_area() const;               // |dM| = 4 pi (r0 phi(r0)^2)^2

    // True when the Green's-function pole problem is well posed at r = 0.
    bool complete_at_pole() const;
    // Mass of the Schwarzschildian far field, used by analytic quadrature
    // tails. Equals mass_param for built-ins, fitted at the table end for
    // custom profiles.
    double tail_mass() const { return tail_mass_; }
    // For custom profiles: |phi(r_end) - 1 - m_tail/(2 r_end)|, the residual
    // controlling the analytic-tail error. Zero-ish for built-ins.
    double tail_residual() const { return tail_residual_; }
    // Largest radius at which phi is directly evaluable (infinity for
    // built-ins, table end for custom).
    double profile_r_end() const { return profile_r_end_; }
    // Smallest sampled radius for custom profiles (0 for built-ins).
    double profile_r_start() const { return profile_r_start_; }

private:
    MetricModel() = default;
    void validate() const;

    MetricKind kind_ = MetricKind::Flat;
    double mass_ = 0.0;
    double a_ = 0.0;
    std::optional<double> inner_radius_;
    Pchip profile_;               // custom only
    double tail_mass_ = 0.0;
    double tail_residual_ = 0.0;
    double profile_r_end_ = std::numeric_limits<double>::infinity();
    double profile_r_start_ = 0.0;
};

} // namespace levelmass
