#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pursuit {

/// Half-width of the two-sided 95% Student-t confidence interval of the mean.
/// Zero for fewer than two samples.
double ci95_half_width(std::span<const double> samples);

double mean(std::span<const double> samples);

/// Trailing moving average: out[t] = mean(x[max(0, t-window+1) .. t]).
std::vector<double> smooth(std::span<const double> values, std::size_t window);

struct CurvePoint {
    std::size_t episode = 0;
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

/// Per-episode mean and 95% CI across runs of the smoothed reward curves.
/// All runs must have the same length.
std::vector<CurvePoint> learning_curve(const std::vector<std::vector<double>>& runs, std::size_t window);

}  // namespace pursuit
