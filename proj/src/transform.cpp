#include "sdelab/transform.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

constexpr double kQuadratureTolerance = 1e-13;

using TanhSinh = boost::math::quadrature::tanh_sinh<double>;

std::string interval_text(double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << "[" << a << ", " << b << "]";
    return os.str();
}

// int_a^c b(z) dz, split at the jumps and support ends of b. Tanh-sinh copes
// with the endpoint singularities of Hoelder cusps that sit on a cut.
double integrate_piece(TanhSinh& quad, const IrregularDrift& b, double a, double c) {
    if (c <= b.support->lo || a >= b.support->hi) return 0.0;
    std::vector<double> cuts{a, c};
    for (double j : b.jumps)
        if (j > a && j < c) cuts.push_back(j);
    for (double e : {b.support->lo, b.support->hi})
        if (e > a && e < c) cuts.push_back(e);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        double error = 0.0;
        double l1 = 0.0;
        double v = 0.0;
        try {
            v = quad.integrate(b.eval, cuts[i], cuts[i + 1], kQuadratureTolerance, &error, &l1);
        } catch (const std::exception&) {
            v = std::numeric_limits<double>::quiet_NaN();
        }
        // b = mu - a cancels to roundoff where a tracks mu, so the absolute floor scales with sup|b|.
        if (!std::isfinite(v) || error > 1e-9 * l1 + 1e-12 * (cuts[i + 1] - cuts[i]) * std::max(1.0, b.sup_norm))
            throw NumericalError("transform: quadrature of b did not converge on " +
                                 interval_text(cuts[i], cuts[i + 1]));
        total += v;
    }
    return total;
}

}  // namespace

ZvonkinTransform::ZvonkinTransform(IrregularDrift b, double knot_spacing, double margin)
    : b_(std::move(b)), h_(knot_spacing) {
    if (!(knot_spacing > 0.0) || !std::isfinite(knot_spacing))
        throw ConfigError("transform: knot spacing must be positive");
    if (!b_.support) throw ConfigError("transform: b must have bounded support");
    if (!std::isfinite(b_.l1_norm) || b_.l1_norm < 0.0) throw ConfigError("transform: ||b||_L1 must be finite");

    k_lo_ = std::min(0L, static_cast<long>(std::floor((b_.support->lo - margin) / h_)));
    const long k_hi = std::max(0L, static_cast<long>(std::ceil((b_.support->hi + margin) / h_)));
    const auto count = static_cast<std::size_t>(k_hi - k_lo_ + 1);
    const auto zero = static_cast<std::size_t>(-k_lo_);

    TanhSinh quad;
    B_.assign(count, 0.0);
    for (std::size_t i = zero; i + 1 < count; ++i)
        B_[i + 1] = B_[i] + integrate_piece(quad, b_, knot_x(i), knot_x(i + 1));
    for (std::size_t i = zero; i > 0; --i) B_[i - 1] = B_[i] - integrate_piece(quad, b_, knot_x(i - 1), knot_x(i));
    // |B| <= ||b||_L1; clamp the rounding of the running sums so the phi' bounds hold exactly.
    l1_ = b_.l1_norm;
    for (double& v : B_) v = std::clamp(v, -l1_, l1_);

    phi_.assign(count, 0.0);
    for (std::size_t i = zero; i + 1 < count; ++i)
        phi_[i + 1] = phi_[i] + segment_integral(i, knot_x(i + 1) - knot_x(i));
    for (std::size_t i = zero; i > 0; --i)
        phi_[i - 1] = phi_[i] - segment_integral(i - 1, knot_x(i) - knot_x(i - 1));

    lower_ = std::exp(-2.0 * l1_);
    upper_ = std::exp(2.0 * l1_);
}

std::size_t ZvonkinTransform::locate(double x) const {
    const long raw = static_cast<long>(std::floor(x / h_)) - k_lo_;
    auto i = static_cast<std::size_t>(std::clamp(raw, 0L, static_cast<long>(B_.size()) - 2));
    while (i > 0 && x < knot_x(i)) --i;
    while (i + 2 < B_.size() && x >= knot_x(i + 1)) ++i;
    return i;
}

double ZvonkinTransform::segment_integral(std::size_t i, double dx) const {
    const double width = knot_x(i + 1) - knot_x(i);
    const double slope = (B_[i + 1] - B_[i]) / width;
    const double base = std::exp(-2.0 * B_[i]);
    if (slope == 0.0) return base * dx;
    return base * (-std::expm1(-2.0 * slope * dx)) / (2.0 * slope);
}

double ZvonkinTransform::B(double x) const {
    if (x <= table_lo()) return B_.front();
    if (x >= table_hi()) return B_.back();
    const std::size_t i = locate(x);
    const double x0 = knot_x(i);
    const double x1 = knot_x(i + 1);
    return B_[i] + (B_[i + 1] - B_[i]) * ((x - x0) / (x1 - x0));
}

double ZvonkinTransform::phi_prime(double x) const { return std::exp(-2.0 * B(x)); }

double ZvonkinTransform::phi_double_prime(double x) const { return -2.0 * b_.eval(x) * phi_prime(x); }

double ZvonkinTransform::phi(double x) const {
    if (x >= table_hi()) return phi_.back() + std::exp(-2.0 * B_.back()) * (x - table_hi());
    if (x <= table_lo()) return phi_.front() + std::exp(-2.0 * B_.front()) * (x - table_lo());
    const std::size_t i = locate(x);
    return phi_[i] + segment_integral(i, x - knot_x(i));
}

double ZvonkinTransform::phi_inv(double y) const {
    if (y == 0.0) return 0.0;
    double lo = y > 0.0 ? y * lower_ : y * upper_;
    double hi = y > 0.0 ? y * upper_ : y * lower_;
    // The bracket is guaranteed when l1_norm bounds |B|; widen it if a caller's bound is off.
    for (int k = 0; k < 64 && phi(lo) > y; ++k) lo -= (hi - lo) + 1.0;
    for (int k = 0; k < 64 && phi(hi) < y; ++k) hi += (hi - lo) + 1.0;

    const double tol = 1e-12 * (1.0 + std::abs(y));
    double x = std::clamp(y / phi_prime(0.0), lo, hi);
    for (int iter = 0; iter < 200; ++iter) {
        const double fx = phi(x) - y;
        if (fx == 0.0) return x;
        if (fx < 0.0)
            lo = x;
        else
            hi = x;
        double next = x - fx / phi_prime(x);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x)) || hi - lo <= 0.0) break;
    }
    if (!(std::abs(phi(x) - y) <= tol)) {
        std::ostringstream os;
        os.precision(17);
        os << "transform: phi_inv did not converge for y = " << y;
        throw NumericalError(os.str());
    }
    return x;
}

void ZvonkinTransform::write_csv(std::ostream& out, std::size_t stride) const {
    if (stride == 0) stride = 1;
    out << "x,B,phi,phi_prime\n";
    char line[160];
    for (std::size_t i = 0; i < B_.size(); i += stride) {
        const double x = knot_x(i);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", x, B_[i], phi_[i], std::exp(-2.0 * B_[i]));
        out << line;
    }
}

ZvonkinTransform build_zvonkin(const IrregularDrift& b, double knot_spacing) {
    return ZvonkinTransform(b, knot_spacing);
}

}  // namespace sdelab
