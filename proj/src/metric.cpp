#include "levelmass/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "levelmass/errors.hpp"
#include "levelmass/numerics.hpp"

namespace levelmass {

std::string to_string(MetricKind kind) {
    switch (kind) {
        case MetricKind::Flat: return "flat";
        case MetricKind::SchwarzschildIsotropic: return "schwarzschild";
        case MetricKind::SmoothedSchwarzschild: return "smoothed_schwarzschild";
        case MetricKind::CustomRadialConformal: return "custom";
    }
    return "?";
}

MetricModel MetricModel::flat(std::optional<double> inner_radius) {
    MetricModel m;
    m.kind_ = MetricKind::Flat;
    m.inner_radius_ = inner_radius;
    m.validate();
    return m;
}

MetricModel MetricModel::schwarzschild(double mass, std::optional<double> inner_radius) {
    MetricModel m;
    m.kind_ = MetricKind::SchwarzschildIsotropic;
    m.mass_ = mass;
    m.inner_radius_ = inner_radius;
    m.tail_mass_ = mass;
    m.validate();
    return m;
}

MetricModel MetricModel::smoothed_schwarzschild(double mass, double a,
                                                std::optional<double> inner_radius) {
    MetricModel m;
    m.kind_ = MetricKind::SmoothedSchwarzschild;
    m.mass_ = mass;
    m.a_ = a;
    m.inner_radius_ = inner_radius;
    m.tail_mass_ = mass;
    if (a < 0.0) throw std::invalid_argument("smoothing scale a must be >= 0");
    if (a == 0.0) m.kind_ = MetricKind::SchwarzschildIsotropic;
    if (mass < 0.0 && a > 0.0 && 1.0 + mass / (2.0 * a) <= 0.0)
        throw std::invalid_argument("conformal factor not positive: need a > |m|/2 for m < 0");
    m.validate();
    return m;
}

MetricModel MetricModel::custom(std::vector<double> r, std::vector<double> phi,
                                std::optional<double> inner_radius) {
    MetricModel m;
    m.kind_ = MetricKind::CustomRadialConformal;
    m.inner_radius_ = inner_radius;
    if (r.size() < 4)
        throw std::invalid_argument("custom profile: need at least 4 samples");
    for (double p : phi)
        if (!(p > 0.0)) throw std::invalid_argument("custom profile: phi must be > 0");
    const double r_end = r.back();
    const double phi_end = phi.back();
    const double r_prev = r[r.size() - 2];
    const double phi_prev = phi[phi.size() - 2];
    m.profile_r_end_ = r_end;
    m.profile_r_start_ = r.front();
    // Schwarzschildian coefficient fitted at the table end: phi ~ 1 + m/(2r).
    // The residual at the next-to-last sample bounds the analytic-tail error.
    m.tail_mass_ = 2.0 * r_end * (phi_end - 1.0);
    m.tail_residual_ = std::abs(phi_prev - 1.0 - m.tail_mass_ / (2.0 * r_prev));
    m.profile_ = Pchip(std::move(r), std::move(phi));
    m.validate();
    return m;
}

MetricModel MetricModel::custom_from_file(const std::filesystem::path& path,
                                          std::optional<double> inner_radius) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open profile file: " + path.string());
    std::string header;
    std::getline(in, header);
    // tolerate whitespace/CR around the mandated header
    std::erase_if(header, [](char c) { return c == ' ' || c == '\r' || c == '\t'; });
    if (header != "r,phi")
        throw ConfigError("profile file " + path.string() + ": first line must be 'r,phi'");
    std::vector<double> r, phi;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double rv, pv;
        if (!(ss >> rv >> pv))
            throw ConfigError("profile file " + path.string() + " line " +
                              std::to_string(lineno) + ": expected 'r,phi'");
        if (!r.empty() && !(rv > r.back()))
            throw ConfigError("profile file " + path.string() + " line " +
                              std::to_string(lineno) + ": r must be strictly increasing");
        r.push_back(rv);
        phi.push_back(pv);
    }
    return custom(std::move(r), std::move(phi), inner_radius);
}

void MetricModel::set_inner_radius(double r0) {
    if (!(r0 > 0.0)) throw std::invalid_argument("inner_radius must be > 0");
    inner_radius_ = r0;
}

void MetricModel::validate() const {
    if (inner_radius_ && !(*inner_radius_ > 0.0))
        throw std::invalid_argument("inner_radius must be > 0");
}

double MetricModel::conformal_factor(double r) const {
    switch (kind_) {
        case MetricKind::Flat:
            return 1.0;
        case MetricKind::SchwarzschildIsotropic:
            if (!(r > 0.0)) throw std::domain_error("phi singular at r <= 0");
            return 1.0 + mass_ / (2.0 * r);
        case MetricKind::SmoothedSchwarzschild:
            if (r < 0.0) throw std::domain_error("need r >= 0");
            return 1.0 + mass_ / (2.0 * std::sqrt(r * r + a_ * a_));
        case MetricKind::CustomRadialConformal:
            if (r > profile_r_end_) {
                // Schwarzschildian continuation beyond the table
                return 1.0 + tail_mass_ / (2.0 * r);
            }
            return profile_(r);
    }
    return 1.0;
}

double MetricModel::phi_prime(double r) const {
    switch (kind_) {
        case MetricKind::Flat:
            return 0.0;
        case MetricKind::SchwarzschildIsotropic:
            if (!(r > 0.0)) throw std::domain_error("phi singular at r <= 0");
            return -mass_ / (2.0 * r * r);
        case MetricKind::SmoothedSchwarzschild: {
            const double s = std::sqrt(r * r + a_ * a_);
            return -mass_ * r / (2.0 * s * s * s);
        }
        case MetricKind::CustomRadialConformal:
            if (r > profile_r_end_) return -tail_mass_ / (2.0 * r * r);
            return profile_.prime(r);
    }
    return 0.0;
}

double MetricModel::phi_second(double r) const {
    switch (kind_) {
        case MetricKind::Flat:
            return 0.0;
        case MetricKind::SchwarzschildIsotropic:
            if (!(r > 0.0)) throw std::domain_error("phi singular at r <= 0");
            return mass_ / (r * r * r);
        case MetricKind::SmoothedSchwarzschild: {
            const double s2 = r * r + a_ * a_;
            const double s = std::sqrt(s2);
            // d/dr [ -m r / (2 s^3) ] = -m (s^2 - 3 r^2) / (2 s^5)
            return -mass_ * (s2 - 3.0 * r * r) / (2.0 * s2 * s2 * s);
        }
        case MetricKind::CustomRadialConformal:
            if (r > profile_r_end_) return tail_mass_ / (r * r * r);
            return profile_.second(r);
    }
    return 0.0;
}

double MetricModel::scalar_curvature(double r) const {
    const double phi = conformal_factor(r);
    double lap; // flat radial Laplacian of phi
    if (kind_ == MetricKind::SmoothedSchwarzschild) {
        // closed form avoids 0/0 at r = 0: lap phi = -(3 m a^2 / 2) (r^2+a^2)^{-5/2}
        const double s2 = r * r + a_ * a_;
        lap = -1.5 * mass_ * a_ * a_ / (s2 * s2 * std::sqrt(s2));
    } else if (kind_ == MetricKind::SchwarzschildIsotropic) {
        lap = 0.0; // m/(2r) is flat-harmonic
    } else if (kind_ == MetricKind::Flat) {
        lap = 0.0;
    } else {
        if (!(r > 0.0)) throw std::domain_error("need r > 0");
        lap = phi_second(r) + 2.0 * phi_prime(r) / r;
    }
    const double p2 = phi * phi;
    return -8.0 * lap / (p2 * p2 * phi);
}

double MetricModel::area_radius(double r) const {
    const double phi = conformal_factor(r);
    return r * phi * phi;
}

double MetricModel::darea_radius_dr(double r) const {
    const double phi = conformal_factor(r);
    return phi * phi + 2.0 * r * phi * phi_prime(r);
}

SphereGeometry MetricModel::sphere_geometry(double r) const {
    if (!(r > 0.0)) throw std::domain_error("sphere_geometry: need r > 0");
    SphereGeometry g;
    g.coord_radius = r;
    const double phi = conformal_factor(r);
    g.area_radius = r * phi * phi;
    g.area = kFourPi * g.area_radius * g.area_radius;
    g.mean_curv = 2.0 * darea_radius_dr(r) / (g.area_radius * phi * phi);
    g.intrinsic_scalar_curv = 2.0 / (g.area_radius * g.area_radius);
    g.ambient_scalar_curv = scalar_curvature(r);
    return g;
}

double MetricModel::horizon_area() const {
    if (!inner_radius_)
        throw std::invalid_argument("horizon_area: inner_radius is not set");
    const double rho0 = area_radius(*inner_radius_);
    return kFourPi * rho0 * rho0;
}

bool MetricModel::complete_at_pole() const {
    return kind_ == MetricKind::Flat ||
           (kind_ == MetricKind::SmoothedSchwarzschild && a_ > 0.0);
}

} // namespace levelmass
