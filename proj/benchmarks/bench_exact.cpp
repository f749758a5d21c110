#include <benchmark/benchmark.h>

#include "erlangr/blocking.hpp"
#include "erlangr/holding.hpp"

using namespace erlangr;

namespace {

// Case 2 scaling with beta = gamma = 1: R1 = range(0), nearest bed rounding.
ModelParams case2(double r1) { return {0.25 * r1, 1.0, 0.25, 0.75}; }

CapacityPair case2_capacity(double r1) { return qed_capacity(r1, 0.25, {1.0, 1.0}, BedRounding::Nearest); }

}  // namespace

static void BM_BlockingReport(benchmark::State& state) {
  const double r1 = static_cast<double>(state.range(0));
  const ModelParams p = case2(r1);
  const CapacityPair cap = case2_capacity(r1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(perf_blocking(stationary_blocking(p, cap)));
  }
  state.counters["n"] = cap.n;
}
BENCHMARK(BM_BlockingReport)->Arg(25)->Arg(250)->Arg(2500)->Unit(benchmark::kMicrosecond);

static void BM_RateMatrix(benchmark::State& state) {
  const double r1 = static_cast<double>(state.range(0));
  const QbdBlocks blocks = build_qbd_blocks(case2(r1), case2_capacity(r1));
  RateMatrixOptions opts;
  opts.method = state.range(1) == 0 ? GMethod::Functional : GMethod::LogarithmicReduction;
  long iterations = 0;
  for (auto _ : state) {
    const RateMatrixG g = solve_rate_matrix(blocks, opts);
    iterations = g.iterations;
    benchmark::DoNotOptimize(g.g.data());
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_RateMatrix)
    ->ArgsProduct({{5, 10, 25}, {0, 1}})
    ->ArgNames({"r1", "lr"})
    ->Unit(benchmark::kMillisecond);

static void BM_HoldingBoundary(benchmark::State& state) {
  const double r1 = static_cast<double>(state.range(0));
  const QbdBlocks blocks = build_qbd_blocks(case2(r1), case2_capacity(r1));
  RateMatrixOptions opts;
  opts.method = GMethod::LogarithmicReduction;
  const RateMatrixG g = solve_rate_matrix(blocks, opts);
  const BoundarySolver solver = state.range(1) == 0 ? BoundarySolver::DenseLU : BoundarySolver::LevelReduction;
  for (auto _ : state) {
    benchmark::DoNotOptimize(stationary_holding(blocks, g, solver));
  }
}
BENCHMARK(BM_HoldingBoundary)
    ->ArgsProduct({{5, 10}, {0, 1}})
    ->ArgNames({"r1", "level"})
    ->Unit(benchmark::kMillisecond);

static void BM_StabilityBound(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ModelParams p{1.0, 1.0, 0.25, 0.75};
  for (auto _ : state) {
    benchmark::DoNotOptimize(rho_max(p, {n / 4, n}));
  }
}
BENCHMARK(BM_StabilityBound)->Arg(100)->Arg(1000)->Arg(10000);
