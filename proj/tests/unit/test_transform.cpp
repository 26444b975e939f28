#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sdelab/drift.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/lamperti.hpp"
#include "sdelab/transform.hpp"

using namespace sdelab;

namespace {

std::vector<DriftSpec> irregular_drifts() {
    return {make_indicator_drift(0.0, 1.0), make_step_drift({{1.0, 0.0}}, 2.0),
            make_step_drift({{0.7, -1.3}, {-1.9, 0.4}, {2.3, 3.1}}, 0.3), make_holder_bump(0.5, 1.0),
            make_holder_bump(0.75, 2.0), make_lipschitz_bump(1.0), make_indicator_drift(-3.2, 0.45)};
}

bool near_jump(const IrregularDrift& b, double x, double dist) {
    return std::any_of(b.jumps.begin(), b.jumps.end(), [&](double j) { return std::abs(x - j) <= dist; });
}

// B(x) = int_0^x b by Simpson on pieces split at 0 and the jumps.
double B_oracle(const IrregularDrift& b, double x) {
    std::vector<double> cuts{0.0, x};
    for (double j : b.jumps)
        if ((j > 0 && j < x) || (j < 0 && j > x)) cuts.push_back(j);
    if (b.support) {
        for (double e : {b.support->lo, b.support->hi})
            if ((e > 0 && e < x) || (e < 0 && e > x)) cuts.push_back(e);
    }
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // one-sided limits at the piece ends, so the value b takes on a jump does not leak in
        const double lo = cuts[i], hi = cuts[i + 1], d = 1e-12 * (hi - lo);
        // x = lo + (hi - lo)(3u^2 - 2u^3) flattens power singularities at the ends
        const auto inner = [&](double u) {
            const double x = lo + (hi - lo) * u * u * (3.0 - 2.0 * u);
            return b.eval(std::clamp(x, lo + d, hi - d)) * (hi - lo) * 6.0 * u * (1.0 - u);
        };
        s += oracle::simpson(inner, 0.0, 1.0, 20000);
    }
    return x >= 0 ? s : -s;
}

}  // namespace

TEST_CASE("zero drift gives the identity transform") {
    const ZvonkinTransform t(IrregularDrift::zero());
    for (double x : {-40.0, -1.5, 0.0, 0.3, 7.0, 123.0}) {
        CHECK(t.phi(x) == doctest::Approx(x).epsilon(1e-15));
        CHECK(t.phi_prime(x) == 1.0);
        CHECK(t.phi_double_prime(x) == 0.0);
        CHECK(t.phi_inv(x) == doctest::Approx(x).epsilon(1e-15));
    }
}

TEST_CASE("indicator transform examples") {
    const auto b = make_indicator_drift(0.0, 1.0).irregular;
    const ZvonkinTransform t = build_zvonkin(b, 1e-3);
    const double phi2 = (1.0 + std::exp(-2.0)) / 2.0;
    CHECK(phi2 == doctest::Approx(0.567667).epsilon(1e-6));
    // Quadrature oracle of int_0^2 exp(-2 B).
    const double oracle_phi2 = oracle::simpson([](double y) { return std::exp(-2.0 * std::min(y, 1.0)); }, 0.0, 1.0) +
                               std::exp(-2.0);
    CHECK(std::abs(oracle_phi2 - phi2) < 1e-12);
    CHECK(std::abs(t.phi(2.0) - phi2) <= 1e-8);
    CHECK(std::abs(t.phi_prime(0.5) - std::exp(-1.0)) <= 1e-12);
    CHECK(std::abs(t.phi_double_prime(0.5) + 2.0 * std::exp(-1.0)) <= 1e-12);
    CHECK(t.phi(0.0) == 0.0);
    CHECK(t.phi_inv(0.0) == 0.0);
    CHECK(std::abs(t.phi_inv(phi2) - 2.0) <= 1e-9);
}

TEST_CASE("indicator phi' range is exactly [e^-2, 1] and attained") {
    const ZvonkinTransform t(make_indicator_drift(0.0, 1.0).irregular);
    double lo = 10.0, hi = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double x = -5.0 + 10.0 * i / 20000.0;
        lo = std::min(lo, t.phi_prime(x));
        hi = std::max(hi, t.phi_prime(x));
    }
    CHECK(t.phi_prime_lower() == std::exp(-2.0));
    CHECK(t.phi_prime_upper() == std::exp(2.0));
    CHECK(hi == 1.0);
    CHECK(lo >= std::exp(-2.0));
    CHECK(lo == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("phi' bounds hold at 10^4 points for every shipped b") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(-30.0, 30.0);
    for (const auto& d : irregular_drifts()) {
        const ZvonkinTransform t(d.irregular);
        const double lower = std::exp(-2.0 * d.irregular.l1_norm);
        const double upper = std::exp(2.0 * d.irregular.l1_norm);
        for (int i = 0; i < 10000; ++i) {
            const double x = U(rng);
            const double p = t.phi_prime(x);
            CHECK(p >= lower);
            CHECK(p <= upper);
        }
    }
}

TEST_CASE("B table agrees with an independent quadrature") {
    for (const auto& d : irregular_drifts()) {
        const ZvonkinTransform t(d.irregular);
        CAPTURE(d.label);
        for (double x : {-4.0, -1.0, -0.35, 0.25, 0.8, 2.0, 5.0}) {
            // Knot values are exact integrals; between knots B is linear.
            const double xk = std::round(x / t.knot_spacing()) * t.knot_spacing();
            CHECK(t.B(xk) == doctest::Approx(B_oracle(d.irregular, xk)).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("ODE residual b phi' + phi''/2 off the jumps") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(-8.0, 8.0);
    for (const auto& d : irregular_drifts()) {
        const ZvonkinTransform t(d.irregular);
        CAPTURE(d.label);
        for (int i = 0; i < 2000; ++i) {
            const double x = U(rng);
            if (near_jump(d.irregular, x, t.knot_spacing())) continue;
            const double bx = d.irregular.eval(x);
            CHECK(std::abs(bx * t.phi_prime(x) + 0.5 * t.phi_double_prime(x)) <= 1e-8 * (1.0 + std::abs(bx)));
        }
    }
}

TEST_CASE("finite-difference phi'' matches -2 b phi' for piecewise constant b") {
    // For piecewise constant b the interpolated B is exact off the jumps, so a
    // central difference of phi' must reproduce the ODE to roundoff, which is
    // relative to phi' (up to e^6.4 for the long indicator).
    for (const auto& d : {make_indicator_drift(0.0, 1.0), make_indicator_drift(-3.2, 0.45)}) {
        const ZvonkinTransform t(d.irregular);
        const double delta = 1e-5;
        for (int i = 0; i <= 400; ++i) {
            const double x = -5.0 + 10.0 * i / 400.0 + 1.234e-4;
            if (near_jump(d.irregular, x, t.knot_spacing())) continue;
            const double fd = (t.phi_prime(x + delta) - t.phi_prime(x - delta)) / (2 * delta);
            const double bx = d.irregular.eval(x);
            CHECK(std::abs(bx * t.phi_prime(x) + 0.5 * fd) <= 1e-8 * (1.0 + std::abs(bx)) * t.phi_prime(x));
        }
    }
}

TEST_CASE("finite-difference phi'' is within the interpolation error for continuous b") {
    // Linear B between knots has slope = mean of b over the knot interval,
    // which differs from b(x) by at most knot_spacing times the modulus of b.
    const auto d = make_lipschitz_bump(1.0);
    const ZvonkinTransform t(d.irregular);
    const double delta = 1e-6;
    for (int i = 0; i < 300; ++i) {
        const double x = -1.5 + 3.0 * i / 300.0 + 3.3e-4;
        const double fd = (t.phi_prime(x + delta) - t.phi_prime(x - delta)) / (2 * delta);
        CHECK(std::abs(d.irregular.eval(x) * t.phi_prime(x) + 0.5 * fd) <= 2.0 * t.knot_spacing() + 1e-8);
    }
}

TEST_CASE("phi is strictly increasing and phi_inv round-trips") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-50.0, 50.0);
    for (const auto& d : irregular_drifts()) {
        const ZvonkinTransform t(d.irregular);
        CAPTURE(d.label);
        CHECK(t.phi(0.0) == 0.0);
        double prev = t.phi(-60.0);
        for (int i = 1; i <= 3000; ++i) {
            const double v = t.phi(-60.0 + 120.0 * i / 3000.0);
            CHECK(v > prev);
            prev = v;
        }
        for (int i = 0; i < 1000; ++i) {
            const double x = U(rng);
            CHECK(std::abs(t.phi_inv(t.phi(x)) - x) <= 1e-9);
        }
        for (double y : {-3.0, -0.01, 0.2, 1.7, 40.0}) CHECK(std::abs(t.phi(t.phi_inv(y)) - y) <= 1e-12 * (1 + std::abs(y)));
    }
}

TEST_CASE("phi' and phi'' vanish-derivative outside the support") {
    for (const auto& d : irregular_drifts()) {
        const ZvonkinTransform t(d.irregular);
        const auto s = *d.irregular.support;
        for (double x : {s.lo - 0.5, s.hi + 0.5, s.hi + 100.0}) CHECK(t.phi_double_prime(x) == 0.0);
        CHECK(t.phi_prime(s.hi + 1.0) == t.phi_prime(s.hi + 50.0));
    }
}

TEST_CASE("phi' o phi^-1 and (phi' a) o phi^-1 are Lipschitz") {
    // d/dy phi'(phi^-1(y)) = -2 b, d/dy (phi' a)(phi^-1(y)) = a' - 2 a b.
    const auto d = make_step_drift({{1.0, 0.0}}, 2.0);
    const ZvonkinTransform t(d.irregular);
    auto max_quotient = [&](auto&& fn, double step) {
        double m = 0.0;
        for (double y = -4.0; y < 4.0; y += step) m = std::max(m, std::abs(fn(y + step) - fn(y)) / step);
        return m;
    };
    auto f1 = [&](double y) { return t.phi_prime(t.phi_inv(y)); };
    auto f2 = [&](double y) {
        const double x = t.phi_inv(y);
        return t.phi_prime(x) * d.smooth.eval(x);
    };
    const double bound1 = 2.0 * d.irregular.sup_norm;
    const double bound2 = d.smooth.sup_norm_d1 + 2.0 * d.smooth.sup_norm * d.irregular.sup_norm;
    for (double step : {1e-2, 1e-3, 1e-4}) {
        CHECK(max_quotient(f1, step) <= bound1 * (1 + 1e-6));
        CHECK(max_quotient(f2, step) <= bound2 * (1 + 1e-6));
    }
}

TEST_CASE("transform rejects bad input and exports CSV") {
    IrregularDrift unbounded = make_indicator_drift(0.0, 1.0).irregular;
    unbounded.support.reset();
    CHECK_THROWS_AS(ZvonkinTransform{unbounded}, ConfigError);
    CHECK_THROWS_AS(ZvonkinTransform(make_indicator_drift(0.0, 1.0).irregular, 0.0), ConfigError);
    IrregularDrift nan_b = make_indicator_drift(0.0, 1.0).irregular;
    nan_b.eval = [](double x) { return x > 0.2 && x < 0.3 ? std::nan("") : 0.0; };
    CHECK_THROWS_AS(ZvonkinTransform{nan_b}, NumericalError);
    try {
        ZvonkinTransform{nan_b};
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("[0.2") != std::string::npos);
    }

    const ZvonkinTransform t(make_indicator_drift(0.0, 1.0).irregular, 0.5);
    std::ostringstream os;
    t.write_csv(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x,B,phi,phi_prime");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == t.knot_count());
}

// ---------------------------------------------------------------------------
// Lamperti reduction

TEST_CASE("Lamperti with unit sigma is the identity") {
    auto mu = [](double x) { return std::sin(x) + 0.3; };
    const auto r = lamperti_reduce(mu, [](double) { return 1.0; }, [](double) { return 0.0; }, 0.0, {-5.0, 5.0});
    for (double x : {-4.0, -0.5, 0.0, 2.2, 4.9}) {
        CHECK(r.lambda(x) == doctest::Approx(x).epsilon(1e-14).scale(1.0));
        CHECK(r.g(x) == doctest::Approx(mu(x)).epsilon(1e-12));
    }
}

TEST_CASE("Lamperti with constant sigma") {
    auto mu = [](double x) { return x > 0.3 ? 1.0 : -0.5 + 0.1 * x; };
    for (double c : {0.5, 2.0, 3.7}) {
        const auto r = lamperti_reduce(mu, [c](double) { return c; }, [](double) { return 0.0; }, 0.0, {-10.0, 10.0});
        for (int i = 0; i <= 100; ++i) {
            const double y = -2.0 + 4.0 * i / 100.0 + 1e-3;
            CHECK(std::abs(r.lambda(y * c) - y) <= 1e-9);
            CHECK(std::abs(r.g(y) - mu(c * y) / c) <= 1e-9);
        }
    }
}

TEST_CASE("Lamperti with sigma = 2 + sin") {
    auto sigma = [](double x) { return 2.0 + std::sin(x); };
    auto dsigma = [](double x) { return std::cos(x); };
    const auto r = lamperti_reduce([](double) { return 0.0; }, sigma, dsigma, 0.0, {-6.0, 6.0});
    CHECK(std::abs(r.lambda_inv(0.0)) <= 1e-12);
    CHECK(std::abs(r.g(0.0) + 0.5) <= 1e-9);
    for (double x : {-5.5, -2.0, 0.7, 3.0, 5.9}) {
        const double oracle_lambda = (x >= 0 ? 1 : -1) *
                                     oracle::simpson([&](double z) { return 1.0 / sigma(z); }, std::min(0.0, x), std::max(0.0, x));
        CHECK(std::abs(r.lambda(x) - oracle_lambda) <= 1e-10);
        const double y = r.lambda(x);
        CHECK(std::abs(r.lambda_inv(y) - x) <= 1e-9);
        CHECK(std::abs(r.g(y) + std::cos(x) / 2.0) <= 1e-9);
        CHECK(r.back_map(y) == r.lambda_inv(y));
    }
    CHECK(r.sigma_inf() > 0.0);
    CHECK(r.sigma_sup() <= 3.0);
}

TEST_CASE("Lamperti lambda is increasing, round-trips, and g is bounded") {
    auto sigma = [](double x) { return 1.5 + 0.5 * std::tanh(x); };
    auto dsigma = [](double x) { return 0.5 / (std::cosh(x) * std::cosh(x)); };
    auto mu = [](double x) { return x > 0 ? 1.0 : -1.0; };
    const auto r = lamperti_reduce(mu, sigma, dsigma, 0.4, {-8.0, 8.0});
    CHECK(std::abs(r.lambda(0.4)) <= 1e-14);
    double prev = r.lambda(-8.0);
    double gmax = 0.0;
    for (int i = 1; i <= 2000; ++i) {
        const double x = -8.0 + 16.0 * i / 2000.0;
        const double y = r.lambda(x);
        CHECK(y > prev);
        prev = y;
        CHECK(std::abs(r.lambda_inv(y) - x) <= 1e-9);
        gmax = std::max(gmax, std::abs(r.g(y)));
    }
    CHECK(gmax <= 1.0 / r.sigma_inf() + 0.5 * 0.5);
}

TEST_CASE("Lamperti rejects degenerate sigma") {
    auto zero = [](double) { return 0.0; };
    CHECK_THROWS_AS(lamperti_reduce(zero, [](double x) { return x; }, [](double) { return 1.0; }, 1.0, {-1.0, 2.0}),
                    ConfigError);
    try {
        lamperti_reduce(zero, [](double x) { return x; }, [](double) { return 1.0; }, 1.0, {-1.0, 2.0});
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("-1") != std::string::npos);
    }
    CHECK_THROWS_AS(lamperti_reduce(zero, [](double x) { return x > 0.5 ? std::nan("") : 1.0; }, zero, 0.0, {-1.0, 1.0}),
                    ConfigError);
    // sigma' inconsistent with sigma.
    CHECK_THROWS_AS(lamperti_reduce(zero, [](double x) { return 2.0 + std::sin(x); }, zero, 0.0, {-1.0, 1.0}),
                    ConfigError);
}
