#include <benchmark/benchmark.h>

#include "manip/compliance.hpp"

namespace {

using manip::MappingKind;

void classify_with(benchmark::State& state, bool parallel) {
  const auto kind = static_cast<MappingKind>(state.range(0));
  const int trials = static_cast<int>(state.range(1));
  const auto config = manip::default_config(kind);
  for (auto _ : state) {
    auto report = parallel ? manip::classify(config, 42, trials) : manip::classify_serial(config, 42, trials);
    benchmark::DoNotOptimize(report);
  }
  state.SetLabel(manip::to_string(kind));
}

void BM_ClassifySerial(benchmark::State& state) { classify_with(state, false); }
void BM_ClassifyParallel(benchmark::State& state) { classify_with(state, true); }

void args(benchmark::internal::Benchmark* b) {
  for (int kind = 0; kind < 3; ++kind) b->Args({kind, 1000});
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ClassifySerial)->Apply(args);
BENCHMARK(BM_ClassifyParallel)->Apply(args);

BENCHMARK_MAIN();
