#include "phasetrack/gain_optimizer.hpp"
#include "phasetrack/montecarlo.hpp"
#include "phasetrack/mse.hpp"

#include <benchmark/benchmark.h>

using namespace phasetrack;

namespace {

const ProcessParams kBaseline{1e4, 1e5};

void BM_TrackingMseNli(benchmark::State& state) {
    double g = 7.4;
    for (auto _ : state) {
        benchmark::DoNotOptimize(tracking_mse(InterferometerConfig::nli(g, 1e7), kBaseline));
        g = g == 7.4 ? 7.5 : 7.4;
    }
}
BENCHMARK(BM_TrackingMseNli);

void BM_OffsetMse(benchmark::State& state) {
    const auto cfg = InterferometerConfig::nli(7.4, 1e7);
    double eps = -1e-5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(offset_mse(cfg, kBaseline, eps).xi);
        eps = -eps;
    }
}
BENCHMARK(BM_OffsetMse);

void BM_OptimizeGain(benchmark::State& state) {
    const auto objective = state.range(0) ? GainObjective::smoothing_floor : GainObjective::tracking;
    for (auto _ : state) benchmark::DoNotOptimize(optimize_gain(kBaseline, 1e7, objective).gain_sq);
}
BENCHMARK(BM_OptimizeGain)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_BruteForceMmse(benchmark::State& state) {
    const auto obs = observation_spectrum(InterferometerConfig::nli(7.4, 1e7), kBaseline);
    const auto n = static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(brute_force_mmse(obs, 0.0, n * 1e-7, 1e-7).mse);
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BruteForceMmse)->RangeMultiplier(2)->Range(250, 2000)->Complexity()->Unit(benchmark::kMillisecond);

// Closed-loop throughput; items/s counts simulated steps.
void BM_ClosedLoop(benchmark::State& state) {
    SimConfig cfg;
    cfg.process = kBaseline;
    cfg.instrument = InterferometerConfig::nli(7.4, 1e7);
    cfg.duration = 2e-3;
    cfg.epsilons = {0.0, 2e-6, -2e-6};
    cfg.fidelity = state.range(0) ? ModelFidelity::exact_homodyne : ModelFidelity::linearized;
    std::size_t steps = 0;
    for (auto _ : state) {
        const auto rep = run_closed_loop(cfg);
        steps += rep.steps;
        benchmark::DoNotOptimize(rep.offsets[0].empirical_mse);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(steps));
}
BENCHMARK(BM_ClosedLoop)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
