#include <benchmark/benchmark.h>

#include "spinloc/refine.hpp"
#include "spinloc/synth.hpp"

static void BM_Refine(benchmark::State& state) {
  const spinloc::Lattice lattice;
  const auto cluster = spinloc::generate_cluster(lattice, spinloc::reference_cluster_spec(), 6);
  const auto table = spinloc::emit_couplings(cluster, 3.0, {spinloc::NoiseKind::Gaussian, 0.2}, 99);
  spinloc::PlacementSolution start;
  start.assignment = cluster.assignment();
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::refine(start, table));
}
BENCHMARK(BM_Refine)->Unit(benchmark::kMillisecond);

static void BM_ResidualGradient(benchmark::State& state) {
  const spinloc::Lattice lattice;
  const auto cluster = spinloc::generate_cluster(lattice, spinloc::reference_cluster_spec(), 6);
  const auto table = spinloc::emit_couplings(cluster, 3.0, {spinloc::NoiseKind::Gaussian, 0.2}, 99);
  std::vector<std::string> labels;
  std::vector<spinloc::Vec3> positions;
  for (const auto& s : cluster.spins) {
    labels.push_back(s.label);
    positions.push_back(s.site.position);
  }
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::residual_and_gradient(labels, positions, table));
}
BENCHMARK(BM_ResidualGradient)->Unit(benchmark::kMicrosecond);
