#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "sdelab/grid.hpp"
#include "sdelab/rng.hpp"

namespace sdelab {

struct StreamId {
    std::uint64_t master_seed = 0;
    std::uint64_t replication = 0;
    bool operator==(const StreamId&) const = default;
};

/// Brownian values W(t_0) = 0, ..., W(t_n) on a grid.
struct BrownianPath {
    Grid grid;
    std::vector<double> values;
    StreamId stream_id;
};

/// W(t_{k+1}) = W(t_k) + sqrt(t_{k+1} - t_k) Z_k, Z_k drawn in index order.
BrownianPath sample_brownian(const Grid& grid, RngStream stream);

/// Path from caller-supplied values (deterministic tests, replays).
/// Throws ConfigError on size mismatch or values[0] != 0.
BrownianPath make_path(Grid grid, std::vector<double> values, StreamId id = {});

/// Sub-sequence of values at the coarse times. Throws ConfigError if not nested.
BrownianPath restrict(const BrownianPath& path, const Grid& coarse);

/// Fills the times of `fine` missing from the path with draws from the Brownian
/// bridge between the surrounding known values; known values are kept bit-for-bit.
BrownianPath bridge_refine(const BrownianPath& path, const Grid& fine, RngStream stream);

void write_path_csv(std::ostream& out, const BrownianPath& path);

}  // namespace sdelab
