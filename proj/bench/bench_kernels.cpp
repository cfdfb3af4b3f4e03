#include <benchmark/benchmark.h>

#include "tcm/scenario.hpp"

using namespace tcm;

namespace {

ScenarioConfig coherent_series(int steps) {
    ScenarioConfig c = preset_config("fig2");
    c.steps = steps;
    return c;
}

void BM_RunSeries(benchmark::State& state, Execution exec) {
    const ScenarioConfig cfg = coherent_series(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(run_series(cfg, exec));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Sweep(benchmark::State& state, bool parallel) {
    SweepOptions opts;
    opts.parallel = parallel;
    const SystemShape shape{2, 2, 4};
    for (auto _ : state) benchmark::DoNotOptimize(positivity_sweep(shape, static_cast<std::uint64_t>(state.range(0)), 7, opts));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_TangleReport(benchmark::State& state) {
    const InitialCondition ic = prepare(coherent_series(2));
    const Trajectory traj(Propagator(ic.params), ic.state);
    const PureState s = traj.at(10.0);
    for (auto _ : state) benchmark::DoNotOptimize(tangle_report(s, 10.0));
}

void BM_ConvexRoof(benchmark::State& state) {
    CMatrix rho = CMatrix::Zero(4, 4);
    rho(0, 0) = rho(3, 3) = 0.35;
    rho(0, 3) = rho(3, 0) = 0.3;
    rho(1, 1) = rho(2, 2) = 0.15;
    const DensityMatrix d(SystemShape{2, 2}, rho);
    for (auto _ : state) benchmark::DoNotOptimize(convex_roof_itangle(d));
}

}  // namespace

BENCHMARK_CAPTURE(BM_RunSeries, serial, Execution::serial)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_RunSeries, parallel, Execution::parallel)->Arg(400)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, serial, false)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Sweep, parallel, true)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TangleReport)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ConvexRoof)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
