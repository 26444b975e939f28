#include "sdelab/scheme.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "sdelab/errors.hpp"

namespace sdelab {

void em_solve_nodes(const DriftSpec& drift, double xi, std::span<const double> times, std::span<const double> w,
                    std::span<double> out) {
    out[0] = xi;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
        const double m = drift(out[k]);
        if (!std::isfinite(m))
            throw NumericalError("em: drift is not finite at step " + std::to_string(k));
        out[k + 1] = out[k] + m * (times[k + 1] - times[k]) + (w[k + 1] - w[k]);
    }
}

EMPath em_solve(const DriftSpec& drift, double xi, const BrownianPath& path) {
    const auto t = path.grid.times();
    EMPath em{path.grid, std::vector<double>(t.size()), std::vector<double>(t.size() - 1), drift, xi};
    em_solve_nodes(drift, xi, t, path.values, em.x_values);
    for (std::size_t k = 0; k + 1 < t.size(); ++k) em.increments[k] = path.values[k + 1] - path.values[k];
    return em;
}

double em_eval_continuous(const EMPath& em, double t, double w_t) {
    const auto times = em.grid.times();
    if (!(t >= 0.0 && t <= em.grid.horizon())) throw ConfigError("em: evaluation time outside [0, T]");
    const auto k = static_cast<std::size_t>(std::upper_bound(times.begin(), times.end(), t) - times.begin()) - 1;
    const double xk = em.x_values[k];
    if (t == times[k]) return xk;
    // W(t_k) recovered from the stored increments.
    double wk = 0.0;
    for (std::size_t j = 0; j < k; ++j) wk += em.increments[j];
    return xk + em.drift(xk) * (t - times[k]) + (w_t - wk);
}

std::optional<EMPath> exact_solution_oracle(const DriftSpec& drift, double xi, const BrownianPath& path) {
    if (!drift.constant_value) return std::nullopt;
    const double c = *drift.constant_value;
    const auto t = path.grid.times();
    EMPath em{path.grid, std::vector<double>(t.size()), std::vector<double>(t.size() - 1), drift, xi};
    for (std::size_t k = 0; k < t.size(); ++k) em.x_values[k] = xi + c * t[k] + path.values[k];
    for (std::size_t k = 0; k + 1 < t.size(); ++k) em.increments[k] = path.values[k + 1] - path.values[k];
    return em;
}

void write_em_csv(std::ostream& out, const EMPath& em, const BrownianPath* path) {
    out << (path ? "t,x,W\n" : "t,x\n");
    char line[96];
    for (std::size_t k = 0; k < em.x_values.size(); ++k) {
        if (path)
            std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g\n", em.grid[k], em.x_values[k], path->values[k]);
        else
            std::snprintf(line, sizeof line, "%.17g,%.17g\n", em.grid[k], em.x_values[k]);
        out << line;
    }
}

}  // namespace sdelab
