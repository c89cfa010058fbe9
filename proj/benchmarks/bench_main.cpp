#include <benchmark/benchmark.h>

#include "pinflip/dynamics.hpp"
#include "pinflip/exact.hpp"
#include "pinflip/spectral.hpp"

using namespace pinflip;

static void BM_PartitionFunction(benchmark::State& state) {
  const ModelParams p{static_cast<int>(state.range(0)), 4.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(partition_function(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PartitionFunction)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMillisecond)->Complexity();

static void BM_ForwardTableWithBackward(benchmark::State& state) {
  const ModelParams p{static_cast<int>(state.range(0)), 4.0, 1.0};
  for (auto _ : state) {
    ForwardTable t(p, true);
    benchmark::DoNotOptimize(t.total_logZ());
  }
}
BENCHMARK(BM_ForwardTableWithBackward)->RangeMultiplier(4)->Range(16, 1024)->Unit(benchmark::kMillisecond);

static void BM_ExactSample(benchmark::State& state) {
  const ModelParams p{static_cast<int>(state.range(0)), 4.0, 1.0};
  const ForwardTable t(p, true);
  Philox rng(1, 0);
  for (auto _ : state) benchmark::DoNotOptimize(exact_sample(t, rng));
}
BENCHMARK(BM_ExactSample)->Arg(100)->Arg(1000);

static void BM_GeneratorBuild(benchmark::State& state) {
  const ModelParams p{static_cast<int>(state.range(0)), 6.0, 3.0};
  for (auto _ : state) benchmark::DoNotOptimize(SparseGenerator::build(p).size());
}
BENCHMARK(BM_GeneratorBuild)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

static void BM_SpectralGap(benchmark::State& state) {
  const ModelParams p{static_cast<int>(state.range(0)), 6.0, 3.0};
  const auto gen = SparseGenerator::build(p);
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(gen).gap);
}
BENCHMARK(BM_SpectralGap)->DenseRange(6, 12, 2)->Unit(benchmark::kMillisecond);

static void BM_SimulatorSteps(benchmark::State& state) {
  const ModelParams p{static_cast<int>(state.range(0)), 4.0, 1.0};
  Simulator sim(p, PathConfig::tent(p.N));
  Philox rng(2, 0);
  for (auto _ : state) benchmark::DoNotOptimize(sim.step(rng));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SimulatorSteps)->Arg(10)->Arg(30)->Arg(1000);
BENCHMARK_MAIN();
