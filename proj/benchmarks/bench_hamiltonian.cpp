#include <benchmark/benchmark.h>

#include "spinloc/hamiltonian.hpp"
#include "spinloc/lattice.hpp"

namespace {

spinloc::SpinSystemSpec strong_pair() {
  const spinloc::Lattice lattice;
  const auto& t = spinloc::default_constants();
  const auto vac = lattice.vacancy();
  return spinloc::make_spin_system(35e6, spinloc::FieldConfig{1960.9, 2.3, 0.0, -2.0028},
                                   {t.si29(), {-4.8e6, 30e3, 0.0}}, lattice.position(lattice.si1()),
                                   {t.si29(), {200e3, 50e3, 0.0}}, lattice.position({vac.i, vac.j, vac.k, 2}));
}

}  // namespace

static void BM_DiagonalizeLabeled(benchmark::State& state) {
  const auto spec = strong_pair();
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::diagonalize_labeled(spec));
}
BENCHMARK(BM_DiagonalizeLabeled)->Unit(benchmark::kMicrosecond);

static void BM_SecondOrder(benchmark::State& state) {
  const auto spec = strong_pair();
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::sedor_correction_second_order(spec, 1.5));
}
BENCHMARK(BM_SecondOrder);

static void BM_DeviationSweep(benchmark::State& state) {
  const auto spec = strong_pair();
  const auto grid = spinloc::uniform_phi_grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spinloc::deviation_sweep(spec, grid, 2.3));
}
BENCHMARK(BM_DeviationSweep)->Arg(12)->Arg(24)->Unit(benchmark::kMillisecond);
