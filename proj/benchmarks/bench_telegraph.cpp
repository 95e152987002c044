#include <benchmark/benchmark.h>

#include "spinloc/synth.hpp"
#include "spinloc/telegraph.hpp"

static void BM_AnalyzeTelegraph(benchmark::State& state) {
  spinloc::TelegraphSpec spec;
  spec.duration = static_cast<double>(state.range(0));
  const auto trace = spinloc::emit_telegraph(spec, 1);
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::analyze_telegraph(trace.trace));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.trace.t.size()));
}
BENCHMARK(BM_AnalyzeTelegraph)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);
