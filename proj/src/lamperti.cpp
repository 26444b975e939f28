#include "sdelab/lamperti.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

std::string at(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

LampertiReduction::LampertiReduction(RealFn mu, RealFn sigma, RealFn sigma_prime, double x0, Interval window,
                                     double knot_spacing)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), sigma_prime_(std::move(sigma_prime)), x0_(x0), window_(window),
      h_(knot_spacing) {
    if (!(window_.lo < window_.hi) || !std::isfinite(window_.lo) || !std::isfinite(window_.hi))
        throw ConfigError("lamperti: window must be a finite interval with lo < hi");
    if (!window_.contains(x0_)) throw ConfigError("lamperti: x0 must lie inside the window");
    if (!(h_ > 0.0)) throw ConfigError("lamperti: knot spacing must be positive");

    const auto segments = static_cast<std::size_t>(std::ceil(window_.width() / h_));
    knots_.resize(segments + 1);
    for (std::size_t i = 0; i <= segments; ++i)
        knots_[i] = i == segments ? window_.hi
                                  : window_.lo + window_.width() * static_cast<double>(i) / static_cast<double>(segments);

    sigma_min_ = std::numeric_limits<double>::infinity();
    sigma_max_ = 0.0;
    auto check = [&](double x) {
        const double s = sigma_(x);
        if (!std::isfinite(s) || !(s > 0.0))
            throw ConfigError("lamperti: sigma must be positive and finite, got " + at(s) + " at x = " + at(x));
        sigma_min_ = std::min(sigma_min_, s);
        sigma_max_ = std::max(sigma_max_, s);
        const double delta = 1e-5 * (1.0 + std::abs(x));
        const double fd = (sigma_(x + delta) - sigma_(x - delta)) / (2.0 * delta);
        const double sp = sigma_prime_(x);
        if (!std::isfinite(sp) || std::abs(fd - sp) > 1e-4 * (1.0 + std::abs(sp) + s))
            throw ConfigError("lamperti: sigma_prime inconsistent with sigma at x = " + at(x));
    };
    for (std::size_t i = 0; i < knots_.size(); ++i) {
        check(knots_[i]);
        if (i + 1 < knots_.size()) check(0.5 * (knots_[i] + knots_[i + 1]));
    }

    lambda_.assign(knots_.size(), 0.0);
    lambda_[0] = -integrate_inverse_sigma(knots_[0], x0_);
    for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
        lambda_[i + 1] = lambda_[i] + integrate_inverse_sigma(knots_[i], knots_[i + 1]);
}

double LampertiReduction::integrate_inverse_sigma(double a, double b) const {
    if (a == b) return 0.0;
    double error = 0.0;
    // Rescaled to u in [0, 1] so boost's stopping test is meaningful on short pieces.
    const double width = b - a;
    const double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        [&](double u) { return width / sigma_(a + width * u); }, 0.0, 1.0, 20, 1e-14, &error);
    if (!std::isfinite(v)) throw NumericalError("lamperti: quadrature of 1/sigma failed on [" + at(a) + ", " + at(b) + "]");
    return v;
}

double LampertiReduction::lambda(double x) const {
    if (x <= knots_.front()) return lambda_.front() - integrate_inverse_sigma(x, knots_.front());
    if (x >= knots_.back()) return lambda_.back() + integrate_inverse_sigma(knots_.back(), x);
    const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
    const auto i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    return lambda_[i] + integrate_inverse_sigma(knots_[i], x);
}

double LampertiReduction::lambda_inv(double y) const {
    // lambda' = 1/sigma lies in [1/sup sigma, 1/inf sigma] on the window.
    double lo = y >= 0.0 ? x0_ + y * sigma_min_ : x0_ + y * sigma_max_;
    double hi = y >= 0.0 ? x0_ + y * sigma_max_ : x0_ + y * sigma_min_;
    for (int k = 0; k < 64 && lambda(lo) > y; ++k) lo -= (hi - lo) + 1.0;
    for (int k = 0; k < 64 && lambda(hi) < y; ++k) hi += (hi - lo) + 1.0;

    double x = std::clamp(x0_ + y * sigma_(x0_), lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = lambda(x) - y;
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        double next = x - fx * sigma_(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) return x;
    }
    return x;
}

double LampertiReduction::g(double y) const {
    const double x = lambda_inv(y);
    return mu_(x) / sigma_(x) - 0.5 * sigma_prime_(x);
}

LampertiReduction lamperti_reduce(RealFn mu, RealFn sigma, RealFn sigma_prime, double x0, Interval window) {
    return LampertiReduction(std::move(mu), std::move(sigma), std::move(sigma_prime), x0, window);
}

}  // namespace sdelab
