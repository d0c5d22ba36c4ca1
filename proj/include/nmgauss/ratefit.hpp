#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "nmgauss/errors.hpp"

namespace nmgauss {

// Least-squares fit of ln(value) against ln(r); slope estimates the decay
// exponent of value ~ c * r^slope.
struct RateFitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 1.0;
    std::vector<std::pair<double, double>> points; // (ln r, ln value)
};

inline RateFitResult fit_rate(const std::vector<std::pair<double, double>>& r_value) {
    if (r_value.size() < 2)
        throw InvalidParameter("fit_rate: need at least two points");
    RateFitResult out;
    out.points.reserve(r_value.size());
    double sx = 0.0, sy = 0.0;
    for (const auto& [r, v] : r_value) {
        if (!(r > 0.0))
            throw InvalidParameter("fit_rate: r values must be positive");
        if (!(v > 0.0))
            throw NumericFailure("fit_rate: cannot fit a rate through a nonpositive value");
        out.points.emplace_back(std::log(r), std::log(v));
        sx += out.points.back().first;
        sy += out.points.back().second;
    }
    const double n = static_cast<double>(out.points.size());
    const double mean_x = sx / n;
    const double mean_y = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : out.points) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if (sxx <= 0.0)
        throw InvalidParameter("fit_rate: r values must not all coincide");
    out.slope = sxy / sxx;
    out.intercept = mean_y - out.slope * mean_x;
    double ss_res = 0.0, ss_tot = 0.0;
    for (const auto& [x, y] : out.points) {
        double fitted = out.intercept + out.slope * x;
        ss_res += (y - fitted) * (y - fitted);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    // a flat series is a perfect fit to a zero slope, not a degenerate one
    out.r_squared = ss_tot < 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
    return out;
}

} // namespace nmgauss
