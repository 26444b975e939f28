#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>

namespace sdelab {

/// Initial value: a fixed number or Uniform(a, b) drawn on the replication's
/// initial-value lane, independent of the Brownian lanes.
class XiSampler {
public:
    struct Uniform {
        double a = 0.0;
        double b = 1.0;
    };

    XiSampler() = default;
    XiSampler(double value) : spec_(value) {}  // NOLINT: implicit from a number is intended
    XiSampler(Uniform u);

    double sample(std::uint64_t master_seed, std::uint64_t replication) const;
    bool deterministic() const { return std::holds_alternative<double>(spec_); }

    /// "0.5" or "uniform:a:b".
    static XiSampler parse(std::string_view text);
    std::string to_string() const;

    const std::variant<double, Uniform>& spec() const { return spec_; }

private:
    std::variant<double, Uniform> spec_ = 0.0;
};

}  // namespace sdelab
