#pragma once

// Drift coefficients mu = a + b with a in C_b^2 and b bounded, integrable.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdelab {

using RealFn = std::function<double(double)>;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

/// Regular part a with its value, two derivatives and their sup bounds.
struct SmoothDrift {
    RealFn eval;
    RealFn deriv1;
    RealFn deriv2;
    double sup_norm = 0.0;
    double sup_norm_d1 = 0.0;
    double sup_norm_d2 = 0.0;

    static SmoothDrift zero();
};

/// Irregular part b. `support` is empty when b is not compactly supported.
/// `kappa_nominal` is the regularity index: |b|_kappa < inf for every kappa
/// below it. `holder_exponent` is set only for globally Hoelder-continuous b.
struct IrregularDrift {
    RealFn eval;
    double sup_norm = 0.0;
    double l1_norm = 0.0;
    std::optional<Interval> support;
    std::optional<double> kappa_nominal;
    std::optional<double> holder_exponent;
    /// Points where b may jump. Used to keep residual checks off discontinuities.
    std::vector<double> jumps;

    static IrregularDrift zero();
};

struct DriftSpec {
    SmoothDrift smooth;
    IrregularDrift irregular;
    std::string label;
    /// Set for drifts that are constant on all of R; enables the exact-solution oracle.
    std::optional<double> constant_value;

    /// mu in closed form when the factory has one (step drifts). b is defined as
    /// closed_form - a, so this is a + b; it only removes the rounding of the split.
    RealFn closed_form;

    double operator()(double x) const { return closed_form ? closed_form(x) : smooth.eval(x) + irregular.eval(x); }
};

double eval_mu(const DriftSpec& spec, double x);

struct StepLevel {
    double gamma = 0.0;
    double location = 0.0;
};

/// Smooth sign profile on (-alpha, alpha): a quintic smoothstep rising from
/// -1 to 1, continuous with its first two derivatives at +-alpha.
double sign_profile(double x, double alpha);
double sign_profile_d1(double x, double alpha);
double sign_profile_d2(double x, double alpha);

/// mu(x) = sum_l gamma_l * sign(x - x_l), split into a smooth sum of shifted
/// sign profiles and the compactly supported remainder b = mu - a.
/// Throws ConfigError on empty levels, unsorted locations or overlapping windows.
DriftSpec make_step_drift(std::vector<StepLevel> levels, double alpha);

/// b(x) = max(0, 1 - |x|/radius)^gamma, smooth part zero.
DriftSpec make_holder_bump(double gamma, double radius);

DriftSpec make_zero_drift();
DriftSpec make_constant_drift(double c);
DriftSpec make_indicator_drift(double lo, double hi);
/// Triangle (1 - |x|/radius)_+ held in the irregular part (Lipschitz, compact support).
DriftSpec make_lipschitz_bump(double radius);
/// a(x) = (1 - (x/radius)^2)^3 on |x| < radius: C^2, compact support, b = 0.
DriftSpec make_smooth_bump(double radius);

/// Resolves a drift id: "zero", "constant:c", "sign:alpha",
/// "step:[(g1,x1),(g2,x2)]:alpha", "indicator:c:d", "holder:gamma:radius",
/// "lipschitz_bump:radius", "smooth_bump:radius".
DriftSpec parse_drift(std::string_view id);

}  // namespace sdelab
