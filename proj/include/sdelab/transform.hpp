#pragma once

// State-space transform
//
//   phi(x) = int_0^x exp(-2 B(y)) dy,   B(x) = int_0^x b(z) dz,
//
// which removes the irregular drift part: phi'' = -2 b phi'. B is tabulated on
// knots x_k = k * knot_spacing (anchored at 0, so B(0) = 0 exactly) covering the
// support of b plus a margin, each knot increment computed by adaptive
// tanh-sinh quadrature. Between knots B is interpolated linearly; phi is the
// exact integral of the interpolated exp(-2 B), so phi' is exactly the
// derivative of phi and stays positive. Outside the table b vanishes and B is
// constant.

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "sdelab/drift.hpp"

namespace sdelab {

inline constexpr double kDefaultKnotSpacing = 1e-3;
inline constexpr double kDefaultKnotMargin = 5.0;

class ZvonkinTransform {
public:
    /// Throws ConfigError for unbounded support or non-positive spacing,
    /// NumericalError when quadrature fails on a knot interval.
    ZvonkinTransform(IrregularDrift b, double knot_spacing = kDefaultKnotSpacing,
                     double margin = kDefaultKnotMargin);

    double B(double x) const;
    double phi(double x) const;
    double phi_prime(double x) const;
    double phi_double_prime(double x) const;
    /// Safeguarded Newton inside the bracket [y e^{-2L}, y e^{2L}] (sign-adjusted).
    double phi_inv(double y) const;

    /// Global bounds exp(-+2 ||b||_{L1}) on phi'.
    double phi_prime_lower() const { return lower_; }
    double phi_prime_upper() const { return upper_; }

    const IrregularDrift& irregular() const { return b_; }
    double l1_bound() const { return l1_; }
    double knot_spacing() const { return h_; }
    double table_lo() const { return knot_x(0); }
    double table_hi() const { return knot_x(B_.size() - 1); }
    std::size_t knot_count() const { return B_.size(); }

    /// CSV with header x,B,phi,phi_prime on every `stride`-th knot.
    void write_csv(std::ostream& out, std::size_t stride = 1) const;

private:
    double knot_x(std::size_t i) const { return static_cast<double>(k_lo_ + static_cast<long>(i)) * h_; }
    /// Knot index i with knot_x(i) <= x < knot_x(i+1); x must lie inside the table.
    std::size_t locate(double x) const;
    /// int_{x_i}^{x_i + dx} exp(-2 B) for the linear B on knot interval i.
    double segment_integral(std::size_t i, double dx) const;

    IrregularDrift b_;
    double h_;
    long k_lo_ = 0;
    std::vector<double> B_;
    std::vector<double> phi_;
    double l1_ = 0.0;
    double lower_ = 1.0;
    double upper_ = 1.0;
};

ZvonkinTransform build_zvonkin(const IrregularDrift& b, double knot_spacing = kDefaultKnotSpacing);

}  // namespace sdelab
