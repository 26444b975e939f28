#pragma once

// Lamperti reduction of dX = mu(X) dt + sigma(X) dW to dY = g(Y) dt + dW with
// lambda(x) = int_{x0}^x dz / sigma(z), Y = lambda(X) and
// g(y) = mu(lambda^-1(y)) / sigma(lambda^-1(y)) - sigma'(lambda^-1(y)) / 2.

#include <vector>

#include "sdelab/drift.hpp"

namespace sdelab {

class LampertiReduction {
public:
    /// Samples sigma on `window`; throws ConfigError if a sample is non-positive,
    /// non-finite, or sigma_prime disagrees with finite differences of sigma.
    LampertiReduction(RealFn mu, RealFn sigma, RealFn sigma_prime, double x0, Interval window,
                      double knot_spacing = 1e-2);

    double lambda(double x) const;
    double lambda_inv(double y) const;
    double g(double y) const;
    /// X_t = lambda^-1(Y_t).
    double back_map(double y) const { return lambda_inv(y); }

    double x0() const { return x0_; }
    double y0() const { return 0.0; }
    const Interval& window() const { return window_; }
    double sigma_inf() const { return sigma_min_; }
    double sigma_sup() const { return sigma_max_; }
    const RealFn& sigma() const { return sigma_; }

private:
    double integrate_inverse_sigma(double a, double b) const;

    RealFn mu_;
    RealFn sigma_;
    RealFn sigma_prime_;
    double x0_;
    Interval window_;
    double h_;
    std::vector<double> knots_;
    std::vector<double> lambda_;
    double sigma_min_ = 0.0;
    double sigma_max_ = 0.0;
};

LampertiReduction lamperti_reduce(RealFn mu, RealFn sigma, RealFn sigma_prime, double x0, Interval window);

}  // namespace sdelab
