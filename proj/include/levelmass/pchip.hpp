#pragma once
// Monotone cubic Hermite interpolation (Fritsch-Carlson slopes). Used for
// sampled conformal profiles and exported solution tables. Unlike a plain
// spline it never overshoots monotone data, and it exposes first and second
// derivatives of the interpolant analytically.

#include <cmath>
#include <stdexcept>
#include <vector>

namespace levelmass {

class Pchip {
public:
    Pchip() = default;

    Pchip(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n)
            throw std::invalid_argument("Pchip: need >= 2 matching samples");
        for (std::size_t i = 1; i < n; ++i)
            if (!(x_[i] > x_[i - 1]))
                throw std::invalid_argument("Pchip: abscissae must be strictly increasing");
        slopes_.resize(n);
        std::vector<double> h(n - 1), d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            h[i] = x_[i + 1] - x_[i];
            d[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        if (n == 2) {
            slopes_[0] = slopes_[1] = d[0];
        } else {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (d[i - 1] == 0.0 || d[i] == 0.0 || (d[i - 1] > 0) != (d[i] > 0)) {
                    slopes_[i] = 0.0;
                } else {
                    const double w1 = 2.0 * h[i] + h[i - 1];
                    const double w2 = h[i] + 2.0 * h[i - 1];
                    slopes_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
                }
            }
            slopes_[0] = edge_slope(h[0], h[1], d[0], d[1]);
            slopes_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
        }
    }

    double min_x() const { return x_.front(); }
    double max_x() const { return x_.back(); }

    double operator()(double x) const {
        const auto [i, t, h] = locate(x);
        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        return h00 * y_[i] + h * h10 * slopes_[i] + h01 * y_[i + 1] + h * h11 * slopes_[i + 1];
    }

    double prime(double x) const {
        const auto [i, t, h] = locate(x);
        const double t2 = t * t;
        const double dh00 = 6 * t2 - 6 * t, dh10 = 3 * t2 - 4 * t + 1;
        const double dh01 = -6 * t2 + 6 * t, dh11 = 3 * t2 - 2 * t;
        return (dh00 * y_[i] + h * dh10 * slopes_[i] + dh01 * y_[i + 1] + h * dh11 * slopes_[i + 1]) / h;
    }

    double second(double x) const {
        const auto [i, t, h] = locate(x);
        const double d2h00 = 12 * t - 6, d2h10 = 6 * t - 4;
        const double d2h01 = -12 * t + 6, d2h11 = 6 * t - 2;
        return (d2h00 * y_[i] + h * d2h10 * slopes_[i] + d2h01 * y_[i + 1] + h * d2h11 * slopes_[i + 1]) / (h * h);
    }

private:
    static double edge_slope(double h0, double h1, double d0, double d1) {
        // Three-point one-sided estimate with the usual shape-preserving clamps.
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) m = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) m = 3.0 * d0;
        return m;
    }

    struct Loc { std::size_t i; double t; double h; };

    Loc locate(double x) const {
        if (!(x >= x_.front() && x <= x_.back()))
            throw std::domain_error("Pchip: query outside the sampled range");
        std::size_t lo = 0, hi = x_.size() - 1;
        while (hi - lo > 1) {
            const std::size_t mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        return {lo, (x - x_[lo]) / h, h};
    }

    std::vector<double> x_, y_, slopes_;
};

} // namespace levelmass
