#include "pursuit/metrics.hpp"

#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "pursuit/errors.hpp"

namespace pursuit {

double mean(std::span<const double> samples) {
    if (samples.empty()) return 0.0;
    return std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(samples.size());
}

double ci95_half_width(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 2) return 0.0;
    const double m = mean(samples);
    double ss = 0.0;
    for (const double x : samples) ss += (x - m) * (x - m);
    const double sd = std::sqrt(ss / static_cast<double>(n - 1));
    const boost::math::students_t dist(static_cast<double>(n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    return t * sd / std::sqrt(static_cast<double>(n));
}

std::vector<double> smooth(std::span<const double> values, std::size_t window) {
    if (window == 0) {
        throw PreconditionError("smoothing window must be at least 1");
    }
    std::vector<double> out(values.size());
    for (std::size_t t = 0; t < values.size(); ++t) {
        const std::size_t first = t + 1 >= window ? t + 1 - window : 0;
        out[t] = mean(values.subspan(first, t + 1 - first));
    }
    return out;
}

std::vector<CurvePoint> learning_curve(const std::vector<std::vector<double>>& runs, std::size_t window) {
    if (runs.empty()) return {};
    const std::size_t len = runs.front().size();
    for (const auto& r : runs) {
        if (r.size() != len) {
            throw PreconditionError("runs have different episode counts");
        }
    }
    std::vector<std::vector<double>> smoothed;
    smoothed.reserve(runs.size());
    for (const auto& r : runs) smoothed.push_back(smooth(r, window));

    std::vector<CurvePoint> curve(len);
    std::vector<double> column(runs.size());
    for (std::size_t t = 0; t < len; ++t) {
        for (std::size_t k = 0; k < runs.size(); ++k) column[k] = smoothed[k][t];
        const double m = mean(column);
        const double h = ci95_half_width(column);
        curve[t] = {t, m, m - h, m + h};
    }
    return curve;
}

}  // namespace pursuit
