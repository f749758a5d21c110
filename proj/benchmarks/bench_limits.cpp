#include <benchmark/benchmark.h>

#include "erlangr/dimensioning.hpp"
#include "erlangr/qed_limits.hpp"

using namespace erlangr;

static void BM_LimitsBlocking(benchmark::State& state) {
  double beta = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(limits_blocking({beta, 1.0, 0.25}));
    beta = beta > 2.0 ? 0.5 : beta + 0.01;
  }
}
BENCHMARK(BM_LimitsBlocking);

static void BM_GaussianMixIntegral(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(gaussian_mix_integral(1.0, 1.0, 0.25));
}
BENCHMARK(BM_GaussianMixIntegral);

static void BM_HoldingApprox(benchmark::State& state) {
  const double r = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(holding_approx({1.0, 1.0}, r));
}
BENCHMARK(BM_HoldingApprox)->Arg(10)->Arg(25)->Arg(50)->Unit(benchmark::kMicrosecond);

static void BM_DimensionHolding(benchmark::State& state) {
  const ModelParams unit{0.32, 4.0, 0.4, 0.975};
  const PinnedCoordinate pin = state.range(0) == 0 ? PinnedCoordinate{Pin::GammaStar, 1.0}
                                                   : PinnedCoordinate{Pin::Beds, 40.0};
  for (auto _ : state) benchmark::DoNotOptimize(dimension_holding(0.5, pin, unit));
}
BENCHMARK(BM_DimensionHolding)->Arg(0)->Arg(1)->ArgName("final_pin")->Unit(benchmark::kMillisecond);
