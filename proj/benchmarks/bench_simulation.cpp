#include <benchmark/benchmark.h>

#include "erlangr/mol.hpp"
#include "erlangr/simulator.hpp"

using namespace erlangr;

static void BM_SimulateHolding(benchmark::State& state) {
  const ModelParams p{2.0, 1.0, 0.25, 0.75};
  SimConfig cfg;
  cfg.model = SimModel::Holding;
  cfg.horizon = static_cast<double>(state.range(0));
  cfg.threads = 1;
  long arrivals = 0;
  for (auto _ : state) {
    const SimResult res = simulate(p, {9, 40}, cfg);
    arrivals += res.flow.arrivals;
  }
  state.counters["arrivals/s"] = benchmark::Counter(static_cast<double>(arrivals), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateHolding)->Arg(10'000)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_SimulateWithPaths(benchmark::State& state) {
  const ModelParams p{2.0, 1.0, 0.25, 0.75};
  SimConfig cfg;
  cfg.horizon = 10'000.0;
  cfg.threads = 1;
  cfg.record_paths = true;
  cfg.max_logged_events = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(p, {9, 40}, cfg));
}
BENCHMARK(BM_SimulateWithPaths)->Unit(benchmark::kMillisecond);

static void BM_OfferedLoad(benchmark::State& state) {
  const ArrivalProfile prof = ArrivalProfile::constant(10.0).scaled(1.0);
  const ModelParams p{10.0, 6.67, 2.18, 0.76};
  const double step = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) {
    const LoadTrajectory traj = integrate_offered_load(prof, p, 24.0 * 7.0, step);
    benchmark::DoNotOptimize(mol_schedule(traj, {0.5, 0.5}, 0.5));
  }
}
BENCHMARK(BM_OfferedLoad)->Arg(20)->Arg(100)->ArgName("steps_per_hour")->Unit(benchmark::kMillisecond);
