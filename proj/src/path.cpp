#include "sdelab/path.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "sdelab/errors.hpp"

namespace sdelab {

BrownianPath sample_brownian(const Grid& grid, RngStream stream) {
    const auto t = grid.times();
    std::vector<double> w(t.size());
    w[0] = 0.0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) w[k + 1] = w[k] + std::sqrt(t[k + 1] - t[k]) * stream.next_normal();
    return {grid, std::move(w), {stream.master_seed(), stream.replication()}};
}

BrownianPath make_path(Grid grid, std::vector<double> values, StreamId id) {
    if (values.size() != grid.times().size()) throw ConfigError("path: value count does not match the grid");
    if (values.front() != 0.0) throw ConfigError("path: W(0) must be 0");
    return {std::move(grid), std::move(values), id};
}

BrownianPath restrict(const BrownianPath& path, const Grid& coarse) {
    const auto map = nesting_map(coarse, path.grid);
    std::vector<double> w(map.size());
    for (std::size_t k = 0; k < map.size(); ++k) w[k] = path.values[map[k]];
    return {coarse, std::move(w), path.stream_id};
}

BrownianPath bridge_refine(const BrownianPath& path, const Grid& fine, RngStream stream) {
    const auto map = nesting_map(path.grid, fine);
    const auto t = fine.times();
    std::vector<double> w(t.size());
    for (std::size_t k = 0; k + 1 < map.size(); ++k) {
        const std::size_t left = map[k];
        const std::size_t right = map[k + 1];
        const double u = t[right];
        const double wu = path.values[k + 1];
        w[left] = path.values[k];
        // Sequential bridge: each new point conditioned on the previous one and the right end.
        for (std::size_t j = left + 1; j < right; ++j) {
            const double s = t[j - 1];
            const double span = u - s;
            const double frac = (t[j] - s) / span;
            const double mean = w[j - 1] + frac * (wu - w[j - 1]);
            const double var = (t[j] - s) * (u - t[j]) / span;
            w[j] = mean + std::sqrt(var) * stream.next_normal();
        }
    }
    w[map.back()] = path.values.back();
    return {fine, std::move(w), path.stream_id};
}

void write_path_csv(std::ostream& out, const BrownianPath& path) {
    out << "t,W\n";
    char line[80];
    for (std::size_t k = 0; k < path.values.size(); ++k) {
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", path.grid[k], path.values[k]);
        out << line;
    }
}

}  // namespace sdelab
