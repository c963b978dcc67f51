// Serial reference against the OpenMP kernels, for grid sweeps and
// Monte-Carlo trials.

#include <benchmark/benchmark.h>

#include "shortlist/simulator.hpp"
#include "shortlist/sweep.hpp"

namespace {

using namespace shortlist;

std::vector<GridPoint> bench_grid() {
  return make_grid(std::vector<double>{1.5, 3.0, 6.0, 10.0}, std::vector<int>{1, 3, 5, 7},
                   standard_shares());
}

void BM_SweepSerial(benchmark::State& state) {
  const auto grid = bench_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(grid));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto grid = bench_grid();
  for (auto _ : state) benchmark::DoNotOptimize(sweep(grid));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

const MarketConfig kSimConfig = MarketConfig::balanced(3.0, 3, 0.3);
const SimOptions kSimOptions{2000, 64, 5};

void BM_EstimateSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        estimate_serial(kSimConfig, Strategy(3.0), Strategy(1.0), kSimOptions));
  }
  state.SetItemsProcessed(state.iterations() * kSimOptions.trials);
}

void BM_EstimateParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(estimate(kSimConfig, Strategy(3.0), Strategy(1.0), kSimOptions));
  }
  state.SetItemsProcessed(state.iterations() * kSimOptions.trials);
}

void BM_SolveMarket(benchmark::State& state) {
  const MarketConfig c = MarketConfig::balanced(1.5, static_cast<int>(state.range(0)), 0.3);
  for (auto _ : state) benchmark::DoNotOptimize(solve_market(c));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EstimateSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SolveMarket)->Arg(1)->Arg(4)->Arg(10)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
