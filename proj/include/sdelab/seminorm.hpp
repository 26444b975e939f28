#pragma once

// Numerical Sobolev-Slobodeckij seminorm
//
//   |f|_kappa^2 = int int |f(x) - f(y)|^2 / |x - y|^(1 + 2 kappa) dx dy
//
// for f supported inside the box [-R, R]. f is sampled at the N cell midpoints
// of the box and replaced by the step function taking those values. For the
// step function the double integral is a finite sum: every off-diagonal cell
// pair (i, j) carries the exact cell-averaged kernel weight
//
//   K_d = h^(1 - 2 kappa) * int_{-1}^{1} (1 - |w|) |d + w|^(-1 - 2 kappa) dw,
//
// d = |i - j|, so  |f|^2 = 2 sum_{d>=1} K_d sum_i (f_i - f_{i+d})^2.
// Pairs with one point outside the box contribute f_i^2 times an integral of
// the kernel that is available in closed form (tail correction).
//
// For kappa >= 1/2 the adjacent-cell weight K_1 diverges. That innermost band
// is then either modelled through a local Hoelder modulus (when the caller
// supplies an exponent above kappa) or omitted, in which case its width is
// returned in error_indicator.

#include <optional>
#include <span>
#include <vector>

#include "sdelab/drift.hpp"
#include "sdelab/parallel.hpp"

namespace sdelab {

struct SobolevEstimate {
    double value = 0.0;
    double kappa = 0.0;
    double truncation_radius = 0.0;
    int grid_points = 0;
    /// Width of the omitted near-diagonal band; 0 when nothing was omitted.
    double error_indicator = 0.0;
};

struct SeminormOptions {
    /// Add the exact contribution of pairs with one point outside the box.
    bool tail_correction = true;
    /// Hoelder exponent of f, used to model the innermost band when kappa >= 1/2.
    std::optional<double> holder_exponent;
    par::Backend backend = par::Backend::openmp;
};

inline constexpr int kDefaultSeminormGridPoints = 2048;

/// Cell-averaged kernel factor G(d) (without the h power) for offset d >= 1.
/// Infinite for d == 1 when kappa >= 1/2.
double seminorm_kernel_weight(long d, double kappa);

/// Sum over offsets of K_d * sum_i (f_i - f_{i+d})^2 for d in [d_min, N).
/// The serial and OpenMP versions produce bit-identical results.
double seminorm_pair_sum_serial(std::span<const double> samples, double h, double kappa, long d_min);
double seminorm_pair_sum_openmp(std::span<const double> samples, double h, double kappa, long d_min);

SobolevEstimate sobolev_seminorm(const RealFn& f, double kappa, double truncation_radius,
                                 int grid_points = kDefaultSeminormGridPoints,
                                 const SeminormOptions& options = {});

/// Default truncation radius: support radius + 10.
double default_truncation_radius(const IrregularDrift& b);

}  // namespace sdelab
