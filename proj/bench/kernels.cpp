// Serial reference versus OpenMP backend for the replication-level kernels.
// Arg 0 selects the backend (0 serial, 1 openmp).

#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "sdelab/drift.hpp"
#include "sdelab/experiment.hpp"
#include "sdelab/quadrature.hpp"
#include "sdelab/seminorm.hpp"

using namespace sdelab;

namespace {

par::Backend backend_of(const benchmark::State& state) {
    return state.range(0) == 0 ? par::Backend::serial : par::Backend::openmp;
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "openmp"); }

void BM_SeminormPairSum(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<double> f(static_cast<std::size_t>(state.range(1)));
    for (double& x : f) x = U(rng);
    const double h = 22.0 / static_cast<double>(f.size());
    for (auto _ : state) {
        const double v = state.range(0) == 0 ? seminorm_pair_sum_serial(f, h, 0.25, 1)
                                             : seminorm_pair_sum_openmp(f, h, 0.25, 1);
        benchmark::DoNotOptimize(v);
    }
    label(state);
}
BENCHMARK(BM_SeminormPairSum)->ArgsProduct({{0, 1}, {2048, 8192}})->Unit(benchmark::kMillisecond);

void BM_StrongConvergence(benchmark::State& state) {
    ExperimentConfig cfg;
    cfg.drift = "sign:2";
    cfg.n_list = {8, 16, 32, 64, 128};
    cfg.replications = 1000;
    for (auto _ : state) benchmark::DoNotOptimize(run_strong_convergence(cfg, backend_of(state)).rate.slope);
    label(state);
}
BENCHMARK(BM_StrongConvergence)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_QuadratureEstimate(benchmark::State& state) {
    QuadratureStudyOptions o;
    o.transform = std::make_shared<const ZvonkinTransform>(make_indicator_drift(0.0, 1.0).irregular);
    o.replications = 1000;
    o.substeps = 32;
    o.backend = backend_of(state);
    const Grid grid = Grid::equidistant(64, 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_W(o, grid, 1.0).estimate);
    label(state);
}
BENCHMARK(BM_QuadratureEstimate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
