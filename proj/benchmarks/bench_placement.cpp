#include <benchmark/benchmark.h>

#include "spinloc/placement.hpp"
#include "spinloc/synth.hpp"

// Noiseless 25-spin reference clusters; the seed picks the cluster.
static void BM_PlaceAll(benchmark::State& state) {
  const spinloc::Lattice lattice;
  const auto seed = static_cast<std::uint64_t>(state.range(0));
  const auto cluster = spinloc::generate_cluster(lattice, spinloc::reference_cluster_spec(), seed);
  const auto table = spinloc::emit_couplings(cluster, 3.0, {spinloc::NoiseKind::Gaussian, 0.0}, seed);
  const auto config = spinloc::strong_pair_placement_config();
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::place_all(table, lattice, config));
  state.counters["couplings"] = static_cast<double>(table.size());
}
BENCHMARK(BM_PlaceAll)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_GenerateCluster(benchmark::State& state) {
  const spinloc::Lattice lattice;
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(spinloc::generate_cluster(lattice, spinloc::reference_cluster_spec(), seed++));
}
BENCHMARK(BM_GenerateCluster)->Unit(benchmark::kMillisecond);
