#include "sdelab/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "sdelab/errors.hpp"

namespace sdelab {

QuadratureValues pathwise_quadrature(const QuadratureProblem& problem, const BrownianPath& path) {
    return pathwise_quadrature(problem, path, problem.grid.horizon());
}

QuadratureValues pathwise_quadrature(const QuadratureProblem& problem, const BrownianPath& path, double t) {
    if (problem.substeps < 1) throw ConfigError("quadrature: substeps must be at least 1");
    if (!problem.transform) throw ConfigError("quadrature: missing transform");
    const std::size_t sub = problem.substeps;
    const auto s = path.grid.times();
    if (s.size() != problem.grid.steps() * sub + 1 || path.grid.horizon() != problem.grid.horizon())
        throw ConfigError("quadrature: path is not on the grid refined by the substep count");
    if (!(t >= 0.0 && t <= problem.grid.horizon())) throw ConfigError("quadrature: t outside [0, T]");

    const ZvonkinTransform& phi = *problem.transform;
    const RealFn& b = phi.irregular().eval;
    const double xi = problem.xi;
    QuadratureValues out;
    double frozen = 0.0;
    for (std::size_t j = 0; j + 1 < s.size() && s[j] < t; ++j) {
        if (j % sub == 0) frozen = b(path.values[j] + xi);
        const double len = std::min(s[j + 1], t) - s[j];
        const double x = path.values[j] + xi;
        const double y = phi.phi_prime(x);
        const double z = j % sub == 0 ? frozen : b(x);
        out.exact += y * z * len;
        out.rule += y * frozen * len;
        out.difference += y * (z - frozen) * len;
    }
    return out;
}

double quadrature_squared_error(const QuadratureStudyOptions& opts, const Grid& grid, double t,
                                std::uint64_t replication) {
    const Grid fine = grid.refine_uniformly(opts.substeps);
    const QuadratureProblem problem{opts.transform, opts.xi.sample(opts.master_seed, replication), grid, opts.substeps};
    const BrownianPath coarse = sample_brownian(grid, RngStream(opts.master_seed, replication, Lane::brownian));
    const BrownianPath refined = bridge_refine(coarse, fine, RngStream(opts.master_seed, replication, Lane::bridge));
    const double d = pathwise_quadrature(problem, refined, t).difference;
    return d * d;
}

QuadratureErrorEstimate estimate_W(const QuadratureStudyOptions& opts, const Grid& grid, double t) {
    if (opts.replications < 2) throw ConfigError("quadrature: need at least 2 replications");
    if (opts.substeps < 1) throw ConfigError("quadrature: substeps must be at least 1");
    if (!opts.transform) throw ConfigError("quadrature: missing transform");
    if (!(t >= 0.0 && t <= grid.horizon())) throw ConfigError("quadrature: t outside [0, T]");

    std::vector<double> sq(opts.replications);
    par::for_each_index(
        opts.replications,
        [&](std::size_t r) {
            sq[r] = quadrature_squared_error(opts, grid, t, opts.replication_offset + r);
            if (!std::isfinite(sq[r])) throw NumericalError("quadrature: non-finite pathwise error");
        },
        opts.backend);

    const auto R = static_cast<double>(opts.replications);
    const double mean = par::pairwise_sum(sq) / R;
    std::vector<double> dev(sq.size());
    for (std::size_t r = 0; r < sq.size(); ++r) dev[r] = (sq[r] - mean) * (sq[r] - mean);
    const double var = par::pairwise_sum(dev) / (R - 1.0);

    QuadratureErrorEstimate est;
    est.t = t;
    est.estimate = mean;
    est.replications = opts.replications;
    est.std_error = std::sqrt(var / R);
    est.substeps = opts.substeps;
    return est;
}

QuadratureStudyResult quadrature_rate_study(const QuadratureStudy& study) {
    if (study.n_list.size() < 3) throw ConfigError("quadrature study: need at least 3 values of n");
    QuadratureStudyResult result;
    std::vector<RatePoint> points;
    for (std::size_t n : study.n_list) {
        const Grid grid = Grid::of_kind(study.kind, n, study.T);
        auto est = estimate_W(study.options, grid, study.T);
        points.push_back({static_cast<double>(n), est.estimate, est.std_error});
        result.estimates.push_back(est);
    }
    result.rate = fit_rate(points);
    result.rate.slope_std_error = propagated_slope_std_error(points);
    return result;
}

}  // namespace sdelab
