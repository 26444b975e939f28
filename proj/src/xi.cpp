#include "sdelab/xi.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "sdelab/errors.hpp"
#include "sdelab/rng.hpp"

namespace sdelab {

namespace {

double parse_value(std::string_view text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError("xi: invalid number '" + std::string(text) + "'");
    return v;
}

}  // namespace

XiSampler::XiSampler(Uniform u) : spec_(u) {
    if (!(u.a < u.b)) throw ConfigError("xi: uniform:a:b needs a < b");
}

double XiSampler::sample(std::uint64_t master_seed, std::uint64_t replication) const {
    if (const auto* v = std::get_if<double>(&spec_)) return *v;
    const auto& u = std::get<Uniform>(spec_);
    const RngStream stream(master_seed, replication, Lane::initial_value);
    return u.a + (u.b - u.a) * stream.uniform_at(0);
}

XiSampler XiSampler::parse(std::string_view text) {
    if (text.rfind("uniform:", 0) == 0) {
        const auto rest = text.substr(8);
        const auto colon = rest.find(':');
        if (colon == std::string_view::npos) throw ConfigError("xi: expected uniform:a:b");
        return XiSampler(Uniform{parse_value(rest.substr(0, colon)), parse_value(rest.substr(colon + 1))});
    }
    return XiSampler(parse_value(text));
}

std::string XiSampler::to_string() const {
    std::ostringstream os;
    os.precision(17);
    if (const auto* v = std::get_if<double>(&spec_))
        os << *v;
    else
        os << "uniform:" << std::get<Uniform>(spec_).a << ":" << std::get<Uniform>(spec_).b;
    return os.str();
}

}  // namespace sdelab
