#include "sdelab/seminorm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

// Second antiderivative of z^(-1-2 kappa) on z >= 0, with F(0) = 0 when finite.
double kernel_primitive(double z, double p) {
    if (p == 0.0) return z == 0.0 ? std::numeric_limits<double>::infinity() : -std::log(z);
    if (z == 0.0) return p > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::pow(z, p) / (p * (p - 1.0));
}

struct SampleRange {
    long first = 0;
    long last = -1;
};

SampleRange nonzero_range(std::span<const double> f) {
    SampleRange r;
    const long n = static_cast<long>(f.size());
    while (r.first < n && f[static_cast<std::size_t>(r.first)] == 0.0) ++r.first;
    r.last = n - 1;
    while (r.last >= r.first && f[static_cast<std::size_t>(r.last)] == 0.0) --r.last;
    return r;
}

// h^p G(d) sum_i (f_i - f_{i+d})^2, summing only where one of the pair is nonzero.
double offset_contribution(std::span<const double> f, SampleRange nz, double hp, double kappa, long d) {
    const long n = static_cast<long>(f.size());
    const long lo = std::max(0L, nz.first - d);
    const long hi = std::min(n - 1 - d, nz.last);
    if (hi < lo) return 0.0;
    double s = 0.0;
    for (long i = lo; i <= hi; ++i) {
        const double diff = f[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i + d)];
        s += diff * diff;
    }
    if (s == 0.0) return 0.0;
    return hp * seminorm_kernel_weight(d, kappa) * s;
}

std::string location(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

double seminorm_kernel_weight(long d, double kappa) {
    const double s = 1.0 + 2.0 * kappa;
    const double p = 1.0 - 2.0 * kappa;
    if (d >= 64) {
        // Even moments of the triangle density (1 - |w|) against (d + w)^-s.
        const double x2 = 1.0 / (static_cast<double>(d) * static_cast<double>(d));
        const double c1 = s * (s + 1.0) / 12.0;
        const double c2 = c1 * (s + 2.0) * (s + 3.0) / 30.0;
        const double c3 = c2 * (s + 4.0) * (s + 5.0) / 56.0;
        return std::pow(static_cast<double>(d), -s) * (1.0 + x2 * (c1 + x2 * (c2 + x2 * c3)));
    }
    const double dd = static_cast<double>(d);
    return kernel_primitive(dd + 1.0, p) - 2.0 * kernel_primitive(dd, p) + kernel_primitive(dd - 1.0, p);
}

double seminorm_pair_sum_serial(std::span<const double> samples, double h, double kappa, long d_min) {
    const long n = static_cast<long>(samples.size());
    if (d_min >= n) return 0.0;
    const SampleRange nz = nonzero_range(samples);
    if (nz.last < nz.first) return 0.0;
    const double hp = std::pow(h, 1.0 - 2.0 * kappa);
    std::vector<double> per_offset(static_cast<std::size_t>(n - d_min));
    for (long d = d_min; d < n; ++d)
        per_offset[static_cast<std::size_t>(d - d_min)] = offset_contribution(samples, nz, hp, kappa, d);
    return par::pairwise_sum(per_offset);
}

double seminorm_pair_sum_openmp(std::span<const double> samples, double h, double kappa, long d_min) {
    const long n = static_cast<long>(samples.size());
    if (d_min >= n) return 0.0;
    const SampleRange nz = nonzero_range(samples);
    if (nz.last < nz.first) return 0.0;
    const double hp = std::pow(h, 1.0 - 2.0 * kappa);
    std::vector<double> per_offset(static_cast<std::size_t>(n - d_min));
    par::for_each_index_openmp(per_offset.size(), [&](std::size_t k) {
        per_offset[k] = offset_contribution(samples, nz, hp, kappa, static_cast<long>(k) + d_min);
    });
    return par::pairwise_sum(per_offset);
}

SobolevEstimate sobolev_seminorm(const RealFn& f, double kappa, double truncation_radius, int grid_points,
                                 const SeminormOptions& options) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw ConfigError("seminorm: kappa must lie in (0, 1)");
    if (!(truncation_radius > 0.0) || !std::isfinite(truncation_radius))
        throw ConfigError("seminorm: truncation radius must be positive");
    if (grid_points < 2) throw ConfigError("seminorm: need at least 2 grid points");

    const long n = grid_points;
    const double R = truncation_radius;
    const double h = 2.0 * R / static_cast<double>(n);

    std::vector<double> samples(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        const double x = -R + (static_cast<double>(i) + 0.5) * h;
        const double v = f(x);
        if (!std::isfinite(v)) throw ConfigError("seminorm: non-finite sample f(" + location(x) + ")");
        samples[static_cast<std::size_t>(i)] = v;
    }
    for (double x : {-R, R, -R + 0.5 * h, R - 0.5 * h}) {
        const double v = f(x);
        if (!std::isfinite(v)) throw ConfigError("seminorm: non-finite sample f(" + location(x) + ")");
        if (v != 0.0)
            throw ConfigError("seminorm: f does not vanish at the truncation boundary (x = " + location(x) +
                              "); enlarge the truncation radius");
    }

    SobolevEstimate est;
    est.kappa = kappa;
    est.truncation_radius = R;
    est.grid_points = grid_points;

    const bool singular_band = kappa >= 0.5;
    const long d_min = singular_band ? 2 : 1;
    const double pair_sum = options.backend == par::Backend::serial
                                ? seminorm_pair_sum_serial(samples, h, kappa, d_min)
                                : seminorm_pair_sum_openmp(samples, h, kappa, d_min);
    double total = 2.0 * pair_sum;

    if (singular_band) {
        if (options.holder_exponent && *options.holder_exponent > kappa) {
            // |f(x) - f(y)|^2 <= M |x - y|^(2 gamma) with M from neighbouring samples,
            // integrated over x in a cell and y in it or its two neighbours.
            const double q = 2.0 * *options.holder_exponent - 1.0 - 2.0 * kappa;
            const double c = (std::pow(2.0, q + 3.0) - 2.0) / ((q + 1.0) * (q + 2.0));
            std::vector<double> band(samples.size(), 0.0);
            for (long i = 0; i < n; ++i) {
                const auto k = static_cast<std::size_t>(i);
                const double left = i > 0 ? samples[k] - samples[k - 1] : 0.0;
                const double right = i + 1 < n ? samples[k + 1] - samples[k] : 0.0;
                band[k] = std::max(left * left, right * right);
            }
            total += std::pow(h, 1.0 - 2.0 * kappa) * c * par::pairwise_sum(band);
        } else {
            est.error_indicator = 2.0 * h;
        }
    }

    if (options.tail_correction) {
        // Pairs (x, y) with x in cell i and |y| > R, counted in both orders.
        const double p = 1.0 - 2.0 * kappa;
        auto prim = [p](double z) { return p == 0.0 ? std::log(z) : std::pow(z, p) / p; };
        std::vector<double> tail(samples.size(), 0.0);
        for (long i = 0; i < n; ++i) {
            const double fi = samples[static_cast<std::size_t>(i)];
            if (fi == 0.0) continue;
            const double right = prim(static_cast<double>(n - i)) - prim(static_cast<double>(n - i - 1));
            const double left = prim(static_cast<double>(i + 1)) - prim(static_cast<double>(i));
            tail[static_cast<std::size_t>(i)] = fi * fi * (right + left);
        }
        total += 2.0 * std::pow(h, p) / (2.0 * kappa) * par::pairwise_sum(tail);
    }

    est.value = std::sqrt(total);
    return est;
}

double default_truncation_radius(const IrregularDrift& b) {
    if (!b.support) throw ConfigError("seminorm: default truncation radius needs a compactly supported function");
    return std::max(std::abs(b.support->lo), std::abs(b.support->hi)) + 10.0;
}

}  // namespace sdelab
