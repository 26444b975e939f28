#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdelab/drift.hpp"
#include "sdelab/errors.hpp"
#include "sdelab/experiment.hpp"
#include "sdelab/grid.hpp"
#include "sdelab/parallel.hpp"
#include "sdelab/path.hpp"
#include "sdelab/quadrature.hpp"
#include "sdelab/rng.hpp"
#include "sdelab/scheme.hpp"
#include "sdelab/seminorm.hpp"
#include "sdelab/transform.hpp"
#include "sdelab/xi.hpp"

namespace fs = std::filesystem;
using namespace sdelab;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
    int threads = 0;
    std::uint64_t seed = 20200101;
    std::string out_dir;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--threads", c.threads, "Worker threads (0 = available parallelism)")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", c.seed, "Master seed of the counter-based RNG");
    app->add_option("--out-dir", c.out_dir, "Directory for output files");
}

// Resolves an output target: explicit --out wins, then --out-dir/<fallback>, else stdout.
std::optional<fs::path> output_path(const std::string& out, const Common& c, const std::string& fallback) {
    if (!out.empty()) return c.out_dir.empty() || fs::path(out).is_absolute() ? fs::path(out) : fs::path(c.out_dir) / out;
    if (!c.out_dir.empty()) return fs::path(c.out_dir) / fallback;
    return std::nullopt;
}

template <class Writer>
void emit(const std::optional<fs::path>& target, Writer&& write) {
    if (!target) {
        write(std::cout);
        std::cout.flush();
        return;
    }
    if (target->has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target->parent_path(), ec);
        if (ec) throw ConfigError("cannot create directory " + target->parent_path().string());
    }
    std::ofstream out(*target, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + target->string());
    write(out);
    if (!out) throw ConfigError("write failed: " + target->string());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string slope_text(const RateEstimate& r) {
    if (r.status == RateStatus::exact) return "exact (all errors <= 1e-12)";
    return fmt(r.slope) + " +/- " + fmt(r.slope_std_error);
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
    std::string drift = "sign:2";
    std::string grid = "equi:64";
    double T = 1.0;
    std::string xi = "0.5";
    std::uint64_t replication = 0;
    bool with_w = false;
    std::string out;
};

int run_simulate(const SimulateArgs& a, const Common& c) {
    const DriftSpec drift = parse_drift(a.drift);
    const Grid grid = parse_grid(a.grid, a.T);
    const XiSampler xi = XiSampler::parse(a.xi);
    const BrownianPath path = sample_brownian(grid, RngStream(c.seed, a.replication, Lane::brownian));
    const EMPath em = em_solve(drift, xi.sample(c.seed, a.replication), path);
    emit(output_path(a.out, c, "path.csv"), [&](std::ostream& os) { write_em_csv(os, em, a.with_w ? &path : nullptr); });
    return 0;
}

// converge ------------------------------------------------------------------

struct ConvergeArgs {
    std::string config;
    std::string drift;
    std::string grid;
    std::vector<std::size_t> n_list;
    std::size_t reps = 0;
    std::size_t m = 0;
    std::string xi;
    std::string norm;
    double T = 0.0;
};

int run_converge(const ConvergeArgs& a, const Common& c, const CLI::App& sub, bool seed_given) {
    ExperimentConfig cfg = a.config.empty() ? ExperimentConfig{} : load_experiment_config(a.config);
    bool both = false;
    if (sub.count("--drift")) cfg.drift = a.drift;
    if (!a.grid.empty()) {
        if (a.grid == "both")
            both = true;
        else
            cfg.grid = parse_grid_kind(a.grid);
    }
    if (sub.count("--n-list")) cfg.n_list = a.n_list;
    if (sub.count("--reps")) cfg.replications = a.reps;
    if (sub.count("--m")) cfg.refinement_factor = a.m;
    if (sub.count("--xi")) cfg.xi = XiSampler::parse(a.xi);
    if (sub.count("--norm")) cfg.error_norm = parse_error_norm(a.norm);
    if (sub.count("--T")) cfg.T = a.T;
    if (seed_given) cfg.master_seed = c.seed;
    validate(cfg);
    parse_drift(cfg.drift);

    const fs::path dir = c.out_dir.empty() ? fs::path("results") : fs::path(c.out_dir);
    if (both) {
        const GridComparison cmp = compare_grids(cfg);
        persist_results(cmp.equidistant, dir, "convergence_equi");
        persist_results(cmp.quadratic, dir, "convergence_quad");
        emit(dir / "comparison.csv", [&](std::ostream& os) { write_comparison_csv(os, cmp); });
        std::cout << "equi slope: " << slope_text(cmp.equidistant.rate) << '\n';
        std::cout << "quad slope: " << slope_text(cmp.quadratic.rate) << '\n';
        return 0;
    }
    const ConvergenceResult result = run_strong_convergence(cfg);
    persist_results(result, dir);
    std::cout << "n,error,std_error\n";
    for (const auto& p : result.rate.points)
        std::cout << fmt(p.n) << ',' << fmt(p.error) << ',' << fmt(p.std_error) << '\n';
    std::cout << to_string(cfg.grid) << " slope: " << slope_text(result.rate) << '\n';
    return 0;
}

// quadrature ----------------------------------------------------------------

struct QuadratureArgs {
    std::string drift = "indicator:0:1";
    std::string grid = "equi";
    std::vector<std::size_t> n_list = {8, 16, 32, 64, 128};
    std::size_t reps = 20000;
    std::size_t substeps = kDefaultSubsteps;
    std::string xi = "0";
    double T = 1.0;
    double knot_spacing = 1e-3;
    std::string out;
};

int run_quadrature(const QuadratureArgs& a, const Common& c) {
    const DriftSpec drift = parse_drift(a.drift);
    QuadratureStudy study;
    study.kind = parse_grid_kind(a.grid);
    study.T = a.T;
    study.n_list = a.n_list;
    study.options.transform = std::make_shared<const ZvonkinTransform>(drift.irregular, a.knot_spacing);
    study.options.xi = XiSampler::parse(a.xi);
    study.options.replications = a.reps;
    study.options.substeps = a.substeps;
    study.options.master_seed = c.seed;
    const QuadratureStudyResult result = quadrature_rate_study(study);
    emit(output_path(a.out, c, "quadrature.csv"), [&](std::ostream& os) {
        os << "n,estimate,std_error,substeps,reps\n";
        for (std::size_t i = 0; i < result.estimates.size(); ++i) {
            const auto& e = result.estimates[i];
            os << study.n_list[i] << ',' << fmt(e.estimate) << ',' << fmt(e.std_error) << ',' << e.substeps << ','
               << e.replications << '\n';
        }
    });
    std::cerr << "slope: " << slope_text(result.rate) << '\n';
    return 0;
}

// seminorm ------------------------------------------------------------------

struct SeminormArgs {
    std::string f = "indicator:0:1";
    double kappa = 0.25;
    double radius = 0.0;
    int grid_points = kDefaultSeminormGridPoints;
    std::string out;
};

int run_seminorm(const SeminormArgs& a, const Common& c) {
    const DriftSpec spec = parse_drift(a.f);
    const IrregularDrift& b = spec.irregular;
    const double radius = a.radius > 0.0 ? a.radius : default_truncation_radius(b);
    SeminormOptions options;
    options.holder_exponent = b.holder_exponent;
    const SobolevEstimate est = sobolev_seminorm(b.eval, a.kappa, radius, a.grid_points, options);
    nlohmann::json j;
    j["f"] = a.f;
    j["value"] = est.value;
    j["kappa"] = est.kappa;
    j["truncation_radius"] = est.truncation_radius;
    j["grid_points"] = est.grid_points;
    j["error_indicator"] = est.error_indicator;
    emit(output_path(a.out, c, "seminorm.json"), [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    return 0;
}

// transform-dump ------------------------------------------------------------

struct TransformArgs {
    std::string drift = "indicator:0:1";
    double knot_spacing = 1e-3;
    std::size_t stride = 1;
    std::string out;
};

int run_transform_dump(const TransformArgs& a, const Common& c) {
    const DriftSpec spec = parse_drift(a.drift);
    const ZvonkinTransform phi(spec.irregular, a.knot_spacing);
    emit(output_path(a.out, c, "transform.csv"), [&](std::ostream& os) { phi.write_csv(os, a.stride); });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Strong-convergence laboratory for SDEs with additive noise and irregular drift", "sdelab"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(code_version()));

    Common common;
    add_common(&app, common);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Solve Euler-Maruyama on one Brownian path and write t,x CSV");
    add_common(simulate, common);
    simulate->add_option("--drift", sim.drift, "Drift id")->capture_default_str();
    simulate->add_option("--grid", sim.grid, "Grid spec: equi:n, quad:n or custom:<file>")->capture_default_str();
    simulate->add_option("--T", sim.T, "Time horizon")->capture_default_str();
    simulate->add_option("--xi", sim.xi, "Initial value: number or uniform:a:b")->capture_default_str();
    simulate->add_option("--replication", sim.replication, "Replication index of the RNG stream")->capture_default_str();
    simulate->add_flag("--with-w", sim.with_w, "Add the Brownian path as a third column");
    simulate->add_option("--out", sim.out, "Output CSV (default: stdout)");

    ConvergeArgs conv;
    auto* converge = app.add_subcommand("converge", "Coupled strong-convergence study with log-log rate fit");
    add_common(converge, common);
    converge->add_option("--config", conv.config, "JSON experiment config");
    converge->add_option("--drift", conv.drift, "Drift id (default sign:2)");
    converge->add_option("--grid", conv.grid, "Grid kind: equi, quad or both (default equi)");
    converge->add_option("--n-list", conv.n_list, "Study step counts, comma separated")->delimiter(',');
    converge->add_option("--reps", conv.reps, "Monte Carlo replications (default 4000)");
    converge->add_option("--m", conv.m, "Reference refinement factor (default 4)");
    converge->add_option("--xi", conv.xi, "Initial value: number or uniform:a:b (default 0.5)");
    converge->add_option("--norm", conv.norm, "Error norm: max or terminal (default max)");
    converge->add_option("--T", conv.T, "Time horizon (default 1)");

    QuadratureArgs quad;
    auto* quadrature = app.add_subcommand("quadrature", "Monte Carlo decay study of the weighted quadrature error");
    add_common(quadrature, common);
    quadrature->add_option("--drift", quad.drift, "Drift id; its irregular part is b")->capture_default_str();
    quadrature->add_option("--grid", quad.grid, "Grid kind: equi or quad")->capture_default_str();
    quadrature->add_option("--n-list", quad.n_list, "Step counts, comma separated")->delimiter(',')->capture_default_str();
    quadrature->add_option("--reps", quad.reps, "Monte Carlo replications")->capture_default_str();
    quadrature->add_option("--substeps", quad.substeps, "Sub-steps per grid interval")->capture_default_str();
    quadrature->add_option("--xi", quad.xi, "Initial value: number or uniform:a:b")->capture_default_str();
    quadrature->add_option("--T", quad.T, "Time horizon")->capture_default_str();
    quadrature->add_option("--knot-spacing", quad.knot_spacing, "Knot spacing of the transform table")->capture_default_str();
    quadrature->add_option("--out", quad.out, "Output CSV (default: stdout)");

    SeminormArgs semi;
    auto* seminorm = app.add_subcommand("seminorm", "Sobolev-Slobodeckij seminorm of a drift's irregular part");
    add_common(seminorm, common);
    seminorm->add_option("--f", semi.f, "Drift id; its irregular part is the function")->capture_default_str();
    seminorm->add_option("--kappa", semi.kappa, "Smoothness order in (0, 1)")->capture_default_str();
    seminorm->add_option("--radius", semi.radius, "Truncation radius (default: support radius + 10)");
    seminorm->add_option("--grid-points", semi.grid_points, "Cells across the truncation box")->capture_default_str();
    seminorm->add_option("--out", semi.out, "Output JSON (default: stdout)");

    TransformArgs tr;
    auto* transform = app.add_subcommand("transform-dump", "Write the Zvonkin transform table x,B,phi,phi_prime");
    add_common(transform, common);
    transform->add_option("--drift", tr.drift, "Drift id; its irregular part is b")->capture_default_str();
    transform->add_option("--knot-spacing", tr.knot_spacing, "Knot spacing")->capture_default_str();
    transform->add_option("--stride", tr.stride, "Write every k-th knot")->capture_default_str();
    transform->add_option("--out", tr.out, "Output CSV (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        par::set_threads(common.threads);
        if (simulate->parsed()) return run_simulate(sim, common);
        if (converge->parsed()) return run_converge(conv, common, *converge, app.count("--seed") + converge->count("--seed") > 0);
        if (quadrature->parsed()) return run_quadrature(quad, common);
        if (seminorm->parsed()) return run_seminorm(semi, common);
        if (transform->parsed()) return run_transform_dump(tr, common);
    } catch (const ConfigError& e) {
        std::cerr << "sdelab: configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "sdelab: numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "sdelab: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitConfig;
}
