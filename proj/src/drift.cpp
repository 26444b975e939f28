#include "sdelab/drift.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <regex>
#include <sstream>

#include "sdelab/errors.hpp"

namespace sdelab {

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

double parse_number(std::string_view text, std::string_view what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || !std::isfinite(value))
        throw ConfigError("invalid number '" + std::string(text) + "' for " + std::string(what));
    return value;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string format_number(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

SmoothDrift SmoothDrift::zero() {
    auto z = [](double) { return 0.0; };
    return {z, z, z, 0.0, 0.0, 0.0};
}

IrregularDrift IrregularDrift::zero() {
    IrregularDrift b;
    b.eval = [](double) { return 0.0; };
    b.support = Interval{0.0, 0.0};
    b.holder_exponent = 1.0;
    return b;
}

double eval_mu(const DriftSpec& spec, double x) { return spec(x); }

// With v = (x + alpha) / (2 alpha) the profile is 2 S(v) - 1 where
// S(v) = 10 v^3 - 15 v^4 + 6 v^5 is the normalized primitive of v^2 (1 - v)^2.
double sign_profile(double x, double alpha) {
    if (x >= alpha) return 1.0;
    if (x <= -alpha) return -1.0;
    const double v = (x + alpha) / (2.0 * alpha);
    const double s = v * v * v * (10.0 + v * (-15.0 + 6.0 * v));
    return 2.0 * s - 1.0;
}

double sign_profile_d1(double x, double alpha) {
    if (x >= alpha || x <= -alpha) return 0.0;
    const double v = (x + alpha) / (2.0 * alpha);
    const double w = v * (1.0 - v);
    return 30.0 * w * w / alpha;
}

double sign_profile_d2(double x, double alpha) {
    if (x >= alpha || x <= -alpha) return 0.0;
    const double v = (x + alpha) / (2.0 * alpha);
    return 30.0 * v * (1.0 - v) * (1.0 - 2.0 * v) / (alpha * alpha);
}

DriftSpec make_step_drift(std::vector<StepLevel> levels, double alpha) {
    if (levels.empty()) throw ConfigError("step drift: empty level list");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("step drift: smoothing alpha must be positive");
    for (std::size_t i = 1; i < levels.size(); ++i) {
        const double gap = levels[i].location - levels[i - 1].location;
        if (!(gap > 0.0))
            throw ConfigError("step drift: jump locations must be strictly increasing (index " + std::to_string(i) + ")");
        if (!(alpha < 0.5 * gap))
            throw ConfigError("step drift: smoothing windows overlap between jumps " + std::to_string(i - 1) + " and " +
                              std::to_string(i) + " (alpha = " + format_number(alpha) +
                              ", gap = " + format_number(gap) + ")");
    }

    auto mu = [levels](double x) {
        double s = 0.0;
        for (const auto& l : levels) s += l.gamma * sign(x - l.location);
        return s;
    };
    auto a = [levels, alpha](double x) {
        double s = 0.0;
        for (const auto& l : levels) s += l.gamma * sign_profile(x - l.location, alpha);
        return s;
    };

    double gamma_abs_sum = 0.0;
    double gamma_abs_max = 0.0;
    for (const auto& l : levels) {
        gamma_abs_sum += std::abs(l.gamma);
        gamma_abs_max = std::max(gamma_abs_max, std::abs(l.gamma));
    }

    DriftSpec spec;
    spec.smooth.eval = a;
    spec.smooth.deriv1 = [levels, alpha](double x) {
        double s = 0.0;
        for (const auto& l : levels) s += l.gamma * sign_profile_d1(x - l.location, alpha);
        return s;
    };
    spec.smooth.deriv2 = [levels, alpha](double x) {
        double s = 0.0;
        for (const auto& l : levels) s += l.gamma * sign_profile_d2(x - l.location, alpha);
        return s;
    };
    // Windows are disjoint, so the sup norms of the derivatives are per-level.
    spec.smooth.sup_norm = gamma_abs_sum;
    spec.smooth.sup_norm_d1 = gamma_abs_max * 1.875 / alpha;
    spec.smooth.sup_norm_d2 = gamma_abs_max * 5.0 / (std::sqrt(3.0) * alpha * alpha);

    spec.irregular.eval = [mu, a](double x) { return mu(x) - a(x); };
    spec.closed_form = mu;
    spec.irregular.sup_norm = gamma_abs_max;
    // int |sign - profile| over one window = 5 alpha / 8.
    spec.irregular.l1_norm = 0.625 * alpha * gamma_abs_sum;
    spec.irregular.support = Interval{levels.front().location - alpha, levels.back().location + alpha};
    spec.irregular.kappa_nominal = 0.5;
    for (const auto& l : levels) spec.irregular.jumps.push_back(l.location);

    std::ostringstream label;
    label << "step[";
    for (std::size_t i = 0; i < levels.size(); ++i)
        label << (i ? "," : "") << "(" << levels[i].gamma << "," << levels[i].location << ")";
    label << "]:alpha=" << alpha;
    spec.label = label.str();
    return spec;
}

DriftSpec make_holder_bump(double gamma, double radius) {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("holder bump: gamma must lie in (0, 1]");
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("holder bump: radius must be positive");
    DriftSpec spec;
    spec.smooth = SmoothDrift::zero();
    spec.irregular.eval = [gamma, radius](double x) {
        const double u = 1.0 - std::abs(x) / radius;
        return u > 0.0 ? std::pow(u, gamma) : 0.0;
    };
    spec.irregular.sup_norm = 1.0;
    spec.irregular.l1_norm = 2.0 * radius / (gamma + 1.0);
    spec.irregular.support = Interval{-radius, radius};
    spec.irregular.kappa_nominal = gamma;
    spec.irregular.holder_exponent = gamma;
    spec.label = "holder:" + format_number(gamma) + ":" + format_number(radius);
    return spec;
}

DriftSpec make_zero_drift() {
    DriftSpec spec;
    spec.smooth = SmoothDrift::zero();
    spec.irregular = IrregularDrift::zero();
    spec.label = "zero";
    spec.constant_value = 0.0;
    return spec;
}

DriftSpec make_constant_drift(double c) {
    if (!std::isfinite(c)) throw ConfigError("constant drift: value must be finite");
    DriftSpec spec;
    auto z = [](double) { return 0.0; };
    spec.smooth = {[c](double) { return c; }, z, z, std::abs(c), 0.0, 0.0};
    spec.irregular = IrregularDrift::zero();
    spec.label = "constant:" + format_number(c);
    spec.constant_value = c;
    return spec;
}

DriftSpec make_indicator_drift(double lo, double hi) {
    if (!(lo < hi)) throw ConfigError("indicator drift: need c < d");
    DriftSpec spec;
    spec.smooth = SmoothDrift::zero();
    spec.irregular.eval = [lo, hi](double x) { return (x > lo && x < hi) ? 1.0 : 0.0; };
    spec.irregular.sup_norm = 1.0;
    spec.irregular.l1_norm = hi - lo;
    spec.irregular.support = Interval{lo, hi};
    spec.irregular.kappa_nominal = 0.5;
    spec.irregular.jumps = {lo, hi};
    spec.label = "indicator:" + format_number(lo) + ":" + format_number(hi);
    return spec;
}

DriftSpec make_lipschitz_bump(double radius) {
    DriftSpec spec = make_holder_bump(1.0, radius);
    spec.irregular.eval = [radius](double x) { return std::max(0.0, 1.0 - std::abs(x) / radius); };
    spec.label = "lipschitz_bump:" + format_number(radius);
    return spec;
}

DriftSpec make_smooth_bump(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("smooth bump: radius must be positive");
    DriftSpec spec;
    spec.smooth.eval = [radius](double x) {
        const double u = x / radius;
        const double w = 1.0 - u * u;
        return w > 0.0 ? w * w * w : 0.0;
    };
    spec.smooth.deriv1 = [radius](double x) {
        const double u = x / radius;
        const double w = 1.0 - u * u;
        return w > 0.0 ? -6.0 * u * w * w / radius : 0.0;
    };
    spec.smooth.deriv2 = [radius](double x) {
        const double u = x / radius;
        const double w = 1.0 - u * u;
        return w > 0.0 ? -6.0 * w * (1.0 - 5.0 * u * u) / (radius * radius) : 0.0;
    };
    spec.smooth.sup_norm = 1.0;
    // max of u (1 - u^2)^2 is attained at u = 1/sqrt(5).
    spec.smooth.sup_norm_d1 = 6.0 * (16.0 / (25.0 * std::sqrt(5.0))) / radius;
    spec.smooth.sup_norm_d2 = 6.0 / (radius * radius);
    spec.irregular = IrregularDrift::zero();
    spec.label = "smooth_bump:" + format_number(radius);
    return spec;
}

DriftSpec parse_drift(std::string_view id) {
    const auto colon = id.find(':');
    const std::string_view name = id.substr(0, colon);
    const std::string_view rest = colon == std::string_view::npos ? std::string_view{} : id.substr(colon + 1);
    auto args = [&](std::size_t expected) {
        auto parts = rest.empty() ? std::vector<std::string_view>{} : split(rest, ':');
        if (parts.size() != expected)
            throw ConfigError("drift id '" + std::string(id) + "': expected " + std::to_string(expected) +
                              " parameter(s)");
        return parts;
    };

    if (name == "zero") {
        args(0);
        return make_zero_drift();
    }
    if (name == "constant") return make_constant_drift(parse_number(args(1)[0], "constant:c"));
    if (name == "sign") return make_step_drift({{1.0, 0.0}}, parse_number(args(1)[0], "sign:alpha"));
    if (name == "indicator") {
        auto p = args(2);
        return make_indicator_drift(parse_number(p[0], "indicator:c"), parse_number(p[1], "indicator:d"));
    }
    if (name == "holder") {
        auto p = args(2);
        return make_holder_bump(parse_number(p[0], "holder:gamma"), parse_number(p[1], "holder:radius"));
    }
    if (name == "lipschitz_bump") return make_lipschitz_bump(parse_number(args(1)[0], "lipschitz_bump:radius"));
    if (name == "smooth_bump") return make_smooth_bump(parse_number(args(1)[0], "smooth_bump:radius"));
    if (name == "step") {
        const auto close = rest.rfind(']');
        if (rest.empty() || rest.front() != '[' || close == std::string_view::npos || close + 1 >= rest.size() ||
            rest[close + 1] != ':')
            throw ConfigError("drift id '" + std::string(id) + "': expected step:[(g1,x1),...]:alpha");
        const std::string list(rest.substr(1, close - 1));
        const double alpha = parse_number(rest.substr(close + 2), "step:alpha");
        static const std::regex pair_re(R"(\s*\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)\s*(,|$))");
        std::vector<StepLevel> levels;
        auto it = list.cbegin();
        std::smatch m;
        while (it != list.cend()) {
            if (!std::regex_search(it, list.cend(), m, pair_re, std::regex_constants::match_continuous))
                throw ConfigError("drift id '" + std::string(id) + "': malformed level list");
            levels.push_back({parse_number(m[1].str(), "step:gamma"), parse_number(m[2].str(), "step:x")});
            it = m[0].second;
        }
        return make_step_drift(std::move(levels), alpha);
    }
    throw ConfigError("unknown drift id '" + std::string(id) + "'");
}

}  // namespace sdelab
