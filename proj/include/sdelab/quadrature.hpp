#pragma once

// Monte Carlo estimation of the weighted quadrature error
//
//   W_t = E | int_0^t phi'(W_s + xi) (b(W_s + xi) - b(W_{s_} + xi)) ds |^2,
//
// s_ the last grid node <= s. Per replication the Brownian path is sampled on
// the grid and bridge-refined to `substeps` equal pieces per interval; the
// time integral is the left-endpoint Riemann sum over the pieces.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "sdelab/grid.hpp"
#include "sdelab/parallel.hpp"
#include "sdelab/path.hpp"
#include "sdelab/rate.hpp"
#include "sdelab/transform.hpp"
#include "sdelab/xi.hpp"

namespace sdelab {

inline constexpr std::size_t kDefaultSubsteps = 32;

struct QuadratureProblem {
    std::shared_ptr<const ZvonkinTransform> transform;
    double xi = 0.0;
    Grid grid;
    std::size_t substeps = kDefaultSubsteps;
};

struct QuadratureValues {
    /// int_0^t Y_s Z_s ds with Y = phi'(W + xi), Z = b(W + xi).
    double exact = 0.0;
    /// sum_k Z_{t_k} int_{t_k}^{t_{k+1}} Y_s ds.
    double rule = 0.0;
    /// exact - rule, accumulated term by term to avoid cancellation.
    double difference = 0.0;
};

/// `path` must live on problem.grid refined by problem.substeps. Integrates up
/// to `t` (default T); a partial last piece is truncated at t.
QuadratureValues pathwise_quadrature(const QuadratureProblem& problem, const BrownianPath& path);
QuadratureValues pathwise_quadrature(const QuadratureProblem& problem, const BrownianPath& path, double t);

struct QuadratureErrorEstimate {
    double t = 0.0;
    double estimate = 0.0;
    std::size_t replications = 0;
    double std_error = 0.0;
    std::size_t substeps = 0;
};

struct QuadratureStudyOptions {
    std::shared_ptr<const ZvonkinTransform> transform;
    XiSampler xi;
    std::size_t replications = 0;
    std::size_t substeps = kDefaultSubsteps;
    std::uint64_t master_seed = 0;
    /// First replication index; disjoint ranges give independent estimates.
    std::uint64_t replication_offset = 0;
    par::Backend backend = par::Backend::openmp;
};

/// Squared pathwise error (I - I_rule)^2 for one replication.
double quadrature_squared_error(const QuadratureStudyOptions& opts, const Grid& grid, double t,
                                std::uint64_t replication);

/// Throws ConfigError when replications < 2, substeps < 1 or t outside [0, T].
QuadratureErrorEstimate estimate_W(const QuadratureStudyOptions& opts, const Grid& grid, double t);

struct QuadratureStudy {
    GridKind kind = GridKind::equidistant;
    double T = 1.0;
    std::vector<std::size_t> n_list;
    QuadratureStudyOptions options;
};

struct QuadratureStudyResult {
    std::vector<QuadratureErrorEstimate> estimates;
    /// slope_std_error propagated from the per-point Monte Carlo errors.
    RateEstimate rate;
};

/// estimate_W at t = T for each n, then a log-log fit. Throws ConfigError for
/// fewer than 3 values of n or a degenerate design.
QuadratureStudyResult quadrature_rate_study(const QuadratureStudy& study);

}  // namespace sdelab
