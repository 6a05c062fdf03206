#include <benchmark/benchmark.h>

#include "dsat/harness.hpp"
#include "dsat/rng.hpp"
#include "dsat/spectrum.hpp"

using namespace dsat;

static ode::SpectrumState bench_state(int h) {
    ode::SpectrumState s = ode::init_spectrum(3.5, h);
    // shift a fifth of the 3-clause mass to 2-clauses so the forced terms are live
    s.m2 = 0.3 * s.m3;
    s.m3 -= 2.0 * s.m2 / 3.0;
    return s;
}

static void BM_ForcedDeltaNaive(benchmark::State& state) {
    const ode::SpectrumState s = bench_state(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ode::forced_move_delta_naive(s));
}
BENCHMARK(BM_ForcedDeltaNaive)->Arg(8)->Arg(16)->Arg(31)->Arg(41);

static void BM_ForcedDeltaFactorized(benchmark::State& state) {
    const ode::SpectrumState s = bench_state(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(ode::forced_move_delta(s));
}
BENCHMARK(BM_ForcedDeltaFactorized)->Arg(8)->Arg(16)->Arg(31)->Arg(41);

static harness::SweepConfig bench_sweep() {
    harness::SweepConfig cfg;
    cfg.densities = {3.3, 3.9};
    cfg.n = 2000;
    cfg.trials = 32;
    cfg.base_seed = 5;
    return cfg;
}

static void BM_SweepSerial(benchmark::State& state) {
    const harness::SweepConfig cfg = bench_sweep();
    for (auto _ : state) benchmark::DoNotOptimize(harness::mc_sweep_serial(cfg));
}
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();

static void BM_SweepParallel(benchmark::State& state) {
    harness::SweepConfig cfg = bench_sweep();
    cfg.threads = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(harness::mc_sweep(cfg));
}
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
