#include <benchmark/benchmark.h>

#include "star/explorer.hpp"

using namespace star;

namespace {

AccessTrace random_trace(std::int64_t n, std::uint32_t p) {
  ScheduleConfig cfg;
  cfg.p_in = p;
  cfg.p_out = p;
  return build_trace(gen_random(static_cast<std::size_t>(n), 42), cfg);
}

void BM_BuildGraph(benchmark::State& state) {
  const auto t = random_trace(state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(build_graph(t));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildGraph)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_Bind(benchmark::State& state) {
  const auto t = random_trace(state.range(0), 4);
  const auto g = build_graph(t);
  const ExplorationParams p;
  for (auto _ : state) benchmark::DoNotOptimize(bind(t, g, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Bind)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

void BM_Simulate(benchmark::State& state) {
  const auto t = random_trace(state.range(0), 4);
  const auto b = bind(t, build_graph(t), {});
  for (auto _ : state) benchmark::DoNotOptimize(simulate(t, b));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Simulate)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

// Full pipeline on the 600-datum block transpose at each compared parallelism.
void BM_SynthesizeBlock(benchmark::State& state) {
  ScheduleConfig cfg;
  cfg.p_in = cfg.p_out = static_cast<std::uint32_t>(state.range(0));
  const auto t = build_trace(gen_block(20, 30), cfg);
  const ExplorationParams p;
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(t, p));
}
BENCHMARK(BM_SynthesizeBlock)->Arg(1)->Arg(2)->Arg(3)->Arg(5)->Arg(6);

}  // namespace

BENCHMARK_MAIN();
