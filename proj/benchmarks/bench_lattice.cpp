#include <benchmark/benchmark.h>

#include "spinloc/lattice.hpp"

static void BM_BuildLattice(benchmark::State& state) {
  const spinloc::LatticeParams params;
  const double radius = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::build_lattice(params, radius));
}
BENCHMARK(BM_BuildLattice)->Arg(10)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

static void BM_Shell(benchmark::State& state) {
  const spinloc::Lattice lattice;
  for (auto _ : state) benchmark::DoNotOptimize(lattice.shell(3, spinloc::Sublattice::Si, 15.0));
}
BENCHMARK(BM_Shell)->Unit(benchmark::kMicrosecond);
