#pragma once

// Coupled strong-convergence studies of Euler-Maruyama.
//
// Per replication: sample the Brownian path on the reference grid (m * max n
// steps of the same kind), solve EM there (or use the exact oracle for constant
// drift), restrict the path to each study grid, solve EM on it, and record the
// squared gap to the reference at the study nodes. Per n the error is the
// square root of the replication mean of the max-over-nodes (or terminal)
// squared gap.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdelab/grid.hpp"
#include "sdelab/parallel.hpp"
#include "sdelab/rate.hpp"
#include "sdelab/xi.hpp"

namespace sdelab {

enum class ErrorNorm { max_over_nodes, terminal };

struct ExperimentConfig {
    std::string drift = "sign:2";
    double T = 1.0;
    XiSampler xi = 0.5;
    GridKind grid = GridKind::equidistant;
    std::vector<std::size_t> n_list = {8, 16, 32, 64, 128, 256};
    std::size_t refinement_factor = 4;
    std::size_t replications = 4000;
    std::uint64_t master_seed = 20200101;
    ErrorNorm error_norm = ErrorNorm::max_over_nodes;
    /// Constant drifts use the exact solution as reference; false forces the fine EM reference.
    bool use_exact_oracle = true;
};

/// Throws ConfigError for unsorted/empty n_list, m < 2, R < 2, T <= 0, or a
/// study grid that does not nest in the reference grid.
void validate(const ExperimentConfig& cfg);

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::string_view to_string(ErrorNorm norm);
ErrorNorm parse_error_norm(std::string_view name);

struct ConvergenceResult {
    ExperimentConfig config;
    RateEstimate rate;
    /// True when the constant-drift exact oracle replaced the fine reference.
    bool used_exact_oracle = false;
};

/// Squared gaps for one replication, one entry per study n (same order as n_list).
std::vector<double> replication_gaps(const ExperimentConfig& cfg, std::uint64_t replication);

ConvergenceResult run_strong_convergence(const ExperimentConfig& cfg, par::Backend backend = par::Backend::openmp);

struct GridComparison {
    ConvergenceResult equidistant;
    ConvergenceResult quadratic;
};

/// Same drift, seed and n_list under both grid kinds.
GridComparison compare_grids(const ExperimentConfig& cfg, par::Backend backend = par::Backend::openmp);

/// Side-by-side table: n,equi_error,equi_std_error,quad_error,quad_std_error.
void write_comparison_csv(std::ostream& out, const GridComparison& cmp);

/// Version string echoed in result summaries.
std::string_view code_version();

/// Writes <stem>.csv (n,error,std_error), <stem>.json (fit + config echo),
/// <stem>.dat (log n, log error, fitted log error) and <stem>.svg.
/// Throws ConfigError naming the path when a file cannot be written.
void persist_results(const ConvergenceResult& result, const std::filesystem::path& directory,
                     const std::string& stem = "convergence");

/// Rebuilds the RateEstimate from <stem>.csv and <stem>.json.
RateEstimate load_rate_estimate(const std::filesystem::path& directory, const std::string& stem = "convergence");

/// Shared writers also used by the quadrature study.
void write_rate_csv(std::ostream& out, const RateEstimate& rate);
nlohmann::json rate_to_json(const RateEstimate& rate);
void write_rate_dat(std::ostream& out, const RateEstimate& rate);
void write_rate_svg(std::ostream& out, const RateEstimate& rate, const std::string& title);

}  // namespace sdelab
