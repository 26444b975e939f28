#pragma once

// Counter-based random numbers. Philox4x32-10 maps (counter, key) to four
// 32-bit words with no internal state, so draw j of replication r under seed s
// is a pure function of (s, r, lane, j).
//
// Key   = (seed low word, seed high word)
// Counter = (block low, block high, replication low, replication high ^ lane << 24)
//
// One Philox block yields two 53-bit uniforms, i.e. two draws.

#include <array>
#include <cstdint>

namespace sdelab {

using Philox4x32 = std::array<std::uint32_t, 4>;

Philox4x32 philox4x32_10(Philox4x32 counter, std::array<std::uint32_t, 2> key);

/// Inverse standard normal CDF (Wichura, AS241 PPND16), relative accuracy ~1e-16.
double normal_quantile(double p);

/// Independent sub-streams of one replication.
enum class Lane : std::uint32_t { brownian = 0, bridge = 1, initial_value = 2 };

class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t replication, Lane lane = Lane::brownian)
        : seed_(master_seed), replication_(replication), lane_(lane) {}

    /// Uniform in the open interval (0, 1) for draw `index`.
    double uniform_at(std::uint64_t index) const;
    double normal_at(std::uint64_t index) const { return normal_quantile(uniform_at(index)); }

    /// Sequential draws starting at the current position.
    double next_uniform() { return uniform_at(position_++); }
    double next_normal() { return normal_at(position_++); }

    std::uint64_t position() const { return position_; }
    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t replication() const { return replication_; }
    Lane lane() const { return lane_; }

    RngStream with_lane(Lane lane) const { return {seed_, replication_, lane}; }

private:
    std::uint64_t seed_;
    std::uint64_t replication_;
    Lane lane_;
    std::uint64_t position_ = 0;
};

}  // namespace sdelab
