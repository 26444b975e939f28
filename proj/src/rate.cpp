#include "sdelab/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

struct Design {
    std::vector<double> x;
    std::vector<double> y;
    double xbar = 0.0;
    double sxx = 0.0;
};

Design make_design(std::span<const RatePoint> points) {
    if (points.size() < 3) throw ConfigError("rate fit: need at least 3 points");
    Design d;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].n > 0.0)) throw ConfigError("rate fit: n must be positive (index " + std::to_string(i) + ")");
        if (!(points[i].error > 0.0) || !std::isfinite(points[i].error))
            throw ConfigError("rate fit: nonpositive error at index " + std::to_string(i));
        d.x.push_back(std::log(points[i].n));
        d.y.push_back(std::log(points[i].error));
    }
    for (double v : d.x) d.xbar += v;
    d.xbar /= static_cast<double>(d.x.size());
    for (double v : d.x) d.sxx += (v - d.xbar) * (v - d.xbar);
    if (!(d.sxx > 0.0)) throw ConfigError("rate fit: degenerate design (all n equal)");
    return d;
}

}  // namespace

RateEstimate fit_rate(std::span<const RatePoint> points) {
    const Design d = make_design(points);
    double ybar = 0.0;
    for (double v : d.y) ybar += v;
    ybar /= static_cast<double>(d.y.size());
    double sxy = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) sxy += (d.x[i] - d.xbar) * (d.y[i] - ybar);

    RateEstimate est;
    est.points.assign(points.begin(), points.end());
    est.slope = sxy / d.sxx;
    est.intercept = ybar - est.slope * d.xbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double r = d.y[i] - (est.intercept + est.slope * d.x[i]);
        rss += r * r;
        est.residual_max = std::max(est.residual_max, std::abs(r));
    }
    est.slope_std_error = std::sqrt(rss / static_cast<double>(d.x.size() - 2) / d.sxx);
    if (!std::isfinite(est.slope)) throw NumericalError("rate fit: slope is not finite");
    return est;
}

double propagated_slope_std_error(std::span<const RatePoint> points) {
    const Design d = make_design(points);
    double var = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double w = (d.x[i] - d.xbar) / d.sxx;
        const double rel = points[i].std_error / points[i].error;
        var += w * w * rel * rel;
    }
    return std::sqrt(var);
}

RateEstimate fit_rate_or_exact(std::span<const RatePoint> points) {
    const bool exact = std::all_of(points.begin(), points.end(),
                                   [](const RatePoint& p) { return std::abs(p.error) <= kExactErrorThreshold; });
    if (!exact) return fit_rate(points);
    RateEstimate est;
    est.points.assign(points.begin(), points.end());
    est.status = RateStatus::exact;
    est.slope = est.intercept = est.slope_std_error = std::numeric_limits<double>::quiet_NaN();
    return est;
}

}  // namespace sdelab
