#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sdelab {

struct RatePoint {
    double n = 0.0;
    double error = 0.0;
    double std_error = 0.0;
    bool operator==(const RatePoint&) const = default;
};

enum class RateStatus { fitted, exact };

/// Log-log least-squares fit error ~ exp(intercept) * n^slope.
/// status == exact means every error vanished (<= 1e-12) and no fit was made;
/// slope, intercept and slope_std_error are then NaN.
struct RateEstimate {
    std::vector<RatePoint> points;
    double slope = 0.0;
    double intercept = 0.0;
    double slope_std_error = 0.0;
    double residual_max = 0.0;
    RateStatus status = RateStatus::fitted;
};

inline constexpr double kExactErrorThreshold = 1e-12;

/// OLS on (log n, log error); slope_std_error from the residuals (0 for three
/// collinear points or more). Throws ConfigError for fewer than 3 points, a
/// nonpositive error (naming the index), or all n equal.
RateEstimate fit_rate(std::span<const RatePoint> points);

/// Slope standard error from per-point standard errors by the delta method:
/// Var(slope) = sum_i w_i^2 (se_i / e_i)^2, w_i = (x_i - xbar) / Sxx.
double propagated_slope_std_error(std::span<const RatePoint> points);

/// fit_rate, or status exact when every error is below kExactErrorThreshold.
RateEstimate fit_rate_or_exact(std::span<const RatePoint> points);

}  // namespace sdelab
