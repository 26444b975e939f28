#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace sdelab {

enum class GridKind { equidistant, quadratic, custom };

/// Strictly increasing partition 0 = t_0 < ... < t_n = T.
class Grid {
public:
    /// Custom grid; throws ConfigError unless times start at 0 and strictly increase.
    static Grid custom(std::vector<double> times);
    static Grid equidistant(std::size_t n, double T);
    static Grid quadratic(std::size_t n, double T);
    static Grid of_kind(GridKind kind, std::size_t n, double T);

    std::span<const double> times() const { return times_; }
    double operator[](std::size_t k) const { return times_[k]; }
    double horizon() const { return times_.back(); }
    std::size_t steps() const { return times_.size() - 1; }
    GridKind kind() const { return kind_; }

    /// Every interval split into `substeps` equal pieces; coarse times are kept bit-for-bit.
    Grid refine_uniformly(std::size_t substeps) const;

    bool operator==(const Grid&) const = default;

private:
    Grid(std::vector<double> times, GridKind kind) : times_(std::move(times)), kind_(kind) {}

    std::vector<double> times_;
    GridKind kind_;
};

double mesh_norm(const Grid& g);

/// True iff every coarse time appears in `fine`. Same-kind shipped grids are
/// compared through their integer construction; otherwise with tolerance 1e-14 T.
/// Throws ConfigError on mismatched horizons.
bool is_nested(const Grid& coarse, const Grid& fine);

/// Index of every coarse time inside `fine`; throws ConfigError if not nested.
std::vector<std::size_t> nesting_map(const Grid& coarse, const Grid& fine);

/// sum_{k=1}^{n-1} t_k^{-p} (t_{k+1} - t_k); throws ConfigError unless 0 < p < 1.
double weighted_mesh_sum(const Grid& g, double p);

/// Upper bound 1.5 T^{1-p} / (1-p) that holds for the two shipped kinds.
double weighted_mesh_sum_bound(double T, double p);

/// "equi:n", "quad:n" or "custom:<path>" (newline-separated times).
Grid parse_grid(std::string_view spec, double T);
Grid load_custom_grid(const std::filesystem::path& path);

std::string_view to_string(GridKind kind);
/// "equi" / "quad".
GridKind parse_grid_kind(std::string_view name);

}  // namespace sdelab
