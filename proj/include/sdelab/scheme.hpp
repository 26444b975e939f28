#pragma once

// Euler-Maruyama for dX = mu(X) dt + dW:
//   x(t_{k+1}) = x(t_k) + mu(x(t_k)) (t_{k+1} - t_k) + W(t_{k+1}) - W(t_k),
// and its continuous-time interpolation between nodes.

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "sdelab/drift.hpp"
#include "sdelab/path.hpp"

namespace sdelab {

struct EMPath {
    Grid grid;
    std::vector<double> x_values;
    /// Brownian increments used for each step (size n).
    std::vector<double> increments;
    DriftSpec drift;
    double xi = 0.0;
};

/// Throws NumericalError naming the step when the drift returns a non-finite value.
EMPath em_solve(const DriftSpec& drift, double xi, const BrownianPath& path);

/// Node values only, written into `out` (size n + 1). Allocation-free hot path
/// used by the experiment kernels; same arithmetic as em_solve.
void em_solve_nodes(const DriftSpec& drift, double xi, std::span<const double> times,
                    std::span<const double> w, std::span<double> out);

/// x(t_) + mu(x(t_)) (t - t_) + (W_t - W(t_)) with t_ the last node <= t.
/// Throws ConfigError for t outside [0, T].
double em_eval_continuous(const EMPath& em, double t, double w_t);

/// Exact pathwise solution xi + c t + W_t when the drift is constant; nullopt otherwise.
std::optional<EMPath> exact_solution_oracle(const DriftSpec& drift, double xi, const BrownianPath& path);

void write_em_csv(std::ostream& out, const EMPath& em, const BrownianPath* path = nullptr);

}  // namespace sdelab
