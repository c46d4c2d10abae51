#include <benchmark/benchmark.h>

#include "scatlab/estimation.hpp"
#include "scatlab/processes.hpp"
#include "scatlab/scattering.hpp"
#include "scatlab/wavelet.hpp"

using namespace scatlab;

static void BM_BuildFilterBank(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_filter_bank(n, 1, 10));
}
BENCHMARK(BM_BuildFilterBank)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);

static void BM_SimulateFbm(benchmark::State& state) {
  ProcessSpec spec;
  spec.family = Family::kFbm;
  spec.theta = 0.7;
  spec.length = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate(spec));
    ++spec.seed;
  }
}
BENCHMARK(BM_SimulateFbm)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);

static void BM_SimulateMrm(benchmark::State& state) {
  ProcessSpec spec;
  spec.family = Family::kMrmStationary;
  spec.theta = 0.1;
  spec.length = 2048;
  spec.n_realizations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(spec));
}
BENCHMARK(BM_SimulateMrm)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Scatter(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const int J = static_cast<int>(state.range(1));
  ProcessSpec spec;
  spec.family = Family::kFbm;
  spec.theta = 0.5;
  spec.length = n;
  spec.seed = 3;
  const TimeSeries ts = simulate(spec).series;
  const FilterBank bank = build_filter_bank(n, 1, J + 1);
  for (auto _ : state) benchmark::DoNotOptimize(scatter(ts, bank, 2, 0, J));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Scatter)->Args({1 << 14, 6})->Args({1 << 16, 8})->Unit(benchmark::kMillisecond);

static void BM_MomentSimulation(benchmark::State& state) {
  // One GMM objective evaluation: simulate and scatter 16 blocks.
  const FilterBank bank = build_filter_bank(2048, 1, 6);
  ProcessSpec spec;
  spec.family = Family::kMrmStationary;
  spec.theta = 0.1;
  spec.length = 2048;
  spec.n_realizations = 16;
  for (auto _ : state) {
    const TimeSeries ts = simulate(spec).series;
    benchmark::DoNotOptimize(block_moments(ts, bank, 2, 0, 5));
  }
}
BENCHMARK(BM_MomentSimulation)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
