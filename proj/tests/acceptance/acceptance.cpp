// Acceptance runner: one PASS/FAIL line per criterion.
//
//   spinloc_acceptance [--cli PATH] [--work-dir DIR] [--expect-fail N ...] [--only N ...]
//
// Exit status is 0 when every criterion passes or fails only where listed in
// --expect-fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "pair_fixtures.hpp"
#include "spinloc/calibrate.hpp"
#include "spinloc/error.hpp"
#include "spinloc/hamiltonian.hpp"
#include "spinloc/io.hpp"
#include "spinloc/placement.hpp"
#include "spinloc/refine.hpp"
#include "spinloc/sequences.hpp"
#include "spinloc/spinphys.hpp"
#include "spinloc/synth.hpp"
#include "spinloc/telegraph.hpp"

namespace fs = std::filesystem;
using namespace spinloc;
using Clock = std::chrono::steady_clock;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Context {
  std::string cli;
  fs::path work;
  fs::path fixtures = SPINLOC_FIXTURE_DIR;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Dipolar prefactor from CODATA values, written out here rather than taken
// from the library.
double oracle_alpha(double gamma_a, double gamma_b) {
  const double mu0_over_4pi = 1.25663706212e-6 / (4.0 * pi);
  return mu0_over_4pi * 6.62607015e-34 * gamma_a * gamma_b * 1e30;
}

// ---------------------------------------------------------------------------

Outcome dipolar_formula(const Context&) {
  const auto t0 = Clock::now();
  const SpinSpecies si = default_constants().si29();
  const SpinSpecies c = default_constants().c13();
  const double alpha = dipolar_prefactor(si, c);
  bool ok = std::abs(alpha / oracle_alpha(si.gamma_hz_per_t, c.gamma_hz_per_t) - 1.0) < 1e-12;

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double magic = std::acos(1.0 / std::sqrt(3.0));
  double worst_magic = 0.0, worst_axial = 0.0, worst_scaling = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double r = 1.5 + 15.0 * u(rng);
    const double phi = 2.0 * pi * u(rng);
    const double a_r3 = alpha / (r * r * r);
    const Vec3 origin(u(rng), u(rng), u(rng));
    for (double theta : {magic, pi - magic}) {
      const Vec3 d = r * Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta));
      worst_magic = std::max(worst_magic, std::abs(dipolar_coupling(origin, origin + d, si, c)) / std::abs(a_r3));
    }
    const double axial = dipolar_coupling(origin, origin + Vec3(0, 0, r), si, c);
    const double equatorial = dipolar_coupling(origin, origin + r * Vec3(std::cos(phi), std::sin(phi), 0), si, c);
    worst_axial = std::max({worst_axial, std::abs(axial / a_r3 - 2.0), std::abs(equatorial / a_r3 + 1.0)});

    const Vec3 d = r * Vec3(u(rng) - 0.5, u(rng) - 0.5, u(rng) - 0.5).normalized();
    // Measured against alpha/r^3: near the magic angle C itself is a
    // cancellation and its own relative error is meaningless.
    const double near = dipolar_coupling(origin, origin + d, si, c);
    const double far = dipolar_coupling(origin, origin + 2.0 * d, si, c);
    worst_scaling = std::max(worst_scaling, std::abs(8.0 * far - near) / std::abs(a_r3));
  }
  const double t = seconds_since(t0);
  ok = ok && worst_magic < 1e-12 && worst_axial < 1e-12 && worst_scaling < 1e-12 && t < 1.0;
  return {ok, fmt::format("magic |C|/(a/r^3) {:.1e}, axial/equatorial factor error {:.1e}, 1/r^3 error {:.1e}",
                          worst_magic, worst_axial, worst_scaling)};
}

Outcome perturbation_vs_exact(const Context&) {
  const auto t0 = Clock::now();
  const auto grid = uniform_phi_grid(24);
  const SweepResult strong = deviation_sweep(testing::strong_pair_spec(), grid, 2.3);
  const SweepResult weak = deviation_sweep(testing::weak_pair_spec(), grid, 2.3);
  const double t = seconds_since(t0);
  // "~10 Hz scale" is read as the band [5, 20] Hz.
  const bool ok = strong.max_single() >= 5.0 && strong.max_single() <= 20.0 && strong.max_averaged >= 1.0 &&
                  strong.max_averaged < 3.0 && weak.max_single() <= 0.6 && t < 30.0;
  return {ok, fmt::format("strong: single {:.2f} Hz, averaged {:.2f} Hz; weak single {:.2f} Hz", strong.max_single(),
                          strong.max_averaged, weak.max_single())};
}

Outcome second_order_vs_exact(const Context&) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  int failures = 0;
  double worst_odd = 0.0, worst_gap = 0.0;
  for (int k = 0; k < 50; ++k) {
    const SpinSystemSpec s = testing::random_pair_spec(rng);
    const double half = std::abs(s.coupling(2, 2)) / 2.0;
    for (double ms : {1.5, -1.5}) {
      const double exact = sedor_frequency_exact(s, ms) - half;
      const double analytic = sedor_correction_second_order(s, ms).frequency() - half;
      const double gap = std::abs(exact - analytic);
      worst_gap = std::max(worst_gap, gap);
      if (gap > std::max(0.2 * std::abs(exact), 0.05)) ++failures;
    }
    const auto p = sedor_correction_second_order(s, 1.5);
    const auto m = sedor_correction_second_order(s, -1.5);
    worst_odd = std::max(worst_odd, std::abs(p.odd_part() + m.odd_part()));
  }
  const double t = seconds_since(t0);
  return {failures == 0 && worst_odd < 1e-9 && t < 60.0,
          fmt::format("{} of 100 subspace checks outside tolerance, largest gap {:.3f} Hz, odd residue {:.1e} Hz",
                      failures, worst_gap, worst_odd)};
}

// Criterion 4 results are reused by criterion 6.
struct FixtureRun {
  int seed = 0;
  std::vector<CouplingMeasurement> couplings;
  SyntheticCluster truth;
  std::optional<PlacementResult> result;
  std::string error;
  double seconds = 0.0;
  bool correct = false;
};

std::vector<FixtureRun>& fixture_runs(const Context& ctx) {
  static std::vector<FixtureRun> runs;
  if (!runs.empty()) return runs;
  const Lattice lattice;
  const PlacementConfig config = strong_pair_placement_config();
  for (int seed = 1; seed <= 20; ++seed) {
    FixtureRun run;
    run.seed = seed;
    const fs::path dir = ctx.fixtures / "placement" / fmt::format("seed_{:02d}", seed);
    run.couplings = io::read_couplings(dir / "couplings.csv");
    run.truth = io::cluster_from_json(io::read_text_file(dir / "cluster.json"), lattice);
    const auto t0 = Clock::now();
    try {
      run.result = place_all(run.couplings, lattice, config);
    } catch (const Error& e) {
      run.error = std::string(to_string(e.kind()));
    }
    run.seconds = seconds_since(t0);
    run.correct = run.result && run.result->solutions.size() == 1 &&
                  assignments_equivalent(run.result->solutions.front().assignment, run.truth.assignment(), lattice);
    runs.push_back(std::move(run));
  }
  return runs;
}

Outcome placement_round_trip(const Context& ctx) {
  const auto t0 = Clock::now();
  const auto& runs = fixture_runs(ctx);
  int correct = 0, ambiguous = 0, infeasible = 0, wrong = 0, shape = 0;
  double slowest = 0.0;
  for (const auto& r : runs) {
    slowest = std::max(slowest, r.seconds);
    if (!r.result) {
      ++infeasible;
      continue;
    }
    if (r.correct) {
      ++correct;
      // Rise in raw assignments, collapse to one symmetry class.
      const auto& raw = r.result->branch_history_raw;
      const auto& h = r.result->branch_history;
      if (!h.empty() && h.back() == 1 && *std::max_element(raw.begin(), raw.end()) > raw.front()) ++shape;
    } else if (r.result->solutions.size() == 1) {
      ++wrong;
    } else {
      ++ambiguous;
    }
  }
  const double t = seconds_since(t0);
  const bool ok = correct >= 19 && wrong == 0 && shape == correct && slowest < 30.0 && t < 300.0;
  return {ok, fmt::format("{}/20 unique and correct, {} ambiguous, {} infeasible, {} wrong; rise-then-collapse in "
                          "{}/{}; slowest run {:.2f} s",
                          correct, ambiguous, infeasible, wrong, shape, correct, slowest)};
}

// 4H-SiC Si sublattice generated from the basis directly, vacancy at the
// lower cubic site, for counting admissible sites by brute force.
std::vector<Vec3> oracle_si_sites(double radius) {
  const double a = 3.073, c = 10.053;
  const Vec3 a1(a, 0, 0), a2(-a / 2, a * std::sqrt(3.0) / 2, 0), a3(0, 0, c);
  const double basis[4][3] = {{0, 0, 0}, {1.0 / 3, 2.0 / 3, 0.25}, {2.0 / 3, 1.0 / 3, 0.5}, {1.0 / 3, 2.0 / 3, 0.75}};
  const Vec3 vac = basis[1][0] * a1 + basis[1][1] * a2 + basis[1][2] * a3;
  std::vector<Vec3> out;
  const int n = static_cast<int>(radius / a) + 3, m = static_cast<int>(radius / c) + 2;
  for (int i = -n; i <= n; ++i)
    for (int j = -n; j <= n; ++j)
      for (int k = -m; k <= m; ++k)
        for (const auto& b : basis) {
          const Vec3 p = (i + b[0]) * a1 + (j + b[1]) * a2 + (k + b[2]) * a3 - vac;
          if (p.norm() > 1e-9 && p.norm() <= radius) out.push_back(p);
        }
  return out;
}

Outcome ambiguity_honesty(const Context&) {
  const Lattice lattice;
  const SpinSpecies si = default_constants().si29();
  const double alpha = oracle_alpha(si.gamma_hz_per_t, si.gamma_hz_per_t);
  const Vec3 si1(0, 0, 10.053 / 2);
  auto f_of = [&](const Vec3& p) {
    const Vec3 d = p - si1;
    const double r = d.norm();
    return 0.5 * std::abs(alpha / (r * r * r) * (3.0 * d.z() * d.z() / (r * r) - 1.0));
  };

  // A spin measured only against Si1, at the coupling of a real site plus a
  // 0.3 Hz measurement error.
  std::vector<std::string> lines;
  bool ok = true;
  for (const SiteIndex& truth : {SiteIndex{2, 0, 0, 3}, SiteIndex{0, 0, 1, 2}, SiteIndex{2, 1, 0, 0}}) {
    const double f_meas = f_of(lattice.position(truth)) + 0.3;
    const double tol = 0.6;
    const double r_max = std::cbrt(alpha / (f_meas - tol)) + 1.0;
    std::size_t oracle = 0;
    for (const Vec3& p : oracle_si_sites(si1.norm() + r_max))
      if ((p - si1).norm() > 1e-6 && std::abs(f_of(p) - f_meas) <= tol) ++oracle;

    PlacementConfig config;
    config.reduce_symmetry = false;
    const PlacementResult raw = place_all({{"Si1", "Si21", f_meas}}, lattice, config);
    std::size_t reported = 0;
    bool truth_listed = false;
    for (const auto& a : raw.ambiguous)
      if (a.label == "Si21") {
        reported = a.sites.size();
        for (const auto& site : a.sites) truth_listed |= site.index == truth;
      }

    config.reduce_symmetry = true;
    const PlacementResult reduced = place_all({{"Si1", "Si21", f_meas}}, lattice, config);
    std::size_t covered = 0;
    for (const auto& s : reduced.solutions) covered += s.multiplicity;

    ok = ok && oracle > 1 && reported == oracle && truth_listed && covered == oracle;
    lines.push_back(fmt::format("f={:.2f} Hz: oracle {}, reported {}, symmetry classes {}", f_meas, oracle, reported,
                                reduced.solutions.size()));
  }
  return {ok, fmt::format("{}", fmt::join(lines, "; "))};
}

Outcome refinement(const Context& ctx) {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> box(-3.0, 3.0), fu(3.0, 40.0);
  double worst_gradient = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::vector<std::string> labels{"Si1", "Si2", "Si3", "C1", "Si4", "C2"};
    std::vector<Vec3> pos;
    while (pos.size() < labels.size()) {
      const Vec3 p(box(rng), box(rng), box(rng));
      if (std::all_of(pos.begin(), pos.end(), [&](const Vec3& q) { return (p - q).norm() > 1.5; })) pos.push_back(p);
    }
    std::vector<CouplingMeasurement> ms;
    for (std::size_t a = 0; a < labels.size(); ++a)
      for (std::size_t b = a + 1; b < labels.size(); ++b) ms.push_back({labels[a], labels[b], fu(rng)});
    const auto g = residual_and_gradient(labels, pos, ms);
    Eigen::VectorXd fd(g.gradient.size());
    const double h = 1e-4;
    for (std::size_t k = 0; k < pos.size(); ++k)
      for (int axis = 0; axis < 3; ++axis) {
        auto plus = pos, minus = pos;
        plus[k](axis) += h;
        minus[k](axis) -= h;
        fd(static_cast<Eigen::Index>(3 * k) + axis) =
            (residual_and_gradient(labels, plus, ms).residual - residual_and_gradient(labels, minus, ms).residual) /
            (2 * h);
      }
    worst_gradient = std::max(worst_gradient, (fd - g.gradient).norm() / g.gradient.norm());
  }

  bool monotone = true, within = true;
  double sum = 0.0, largest = 0.0, lo_mean = 1e9, hi_mean = 0.0;
  std::size_t spins = 0, fixtures = 0;
  for (const auto& run : fixture_runs(ctx)) {
    if (!run.correct) continue;
    const RefinementResult r = refine(run.result->solutions.front(), run.couplings);
    for (std::size_t k = 1; k < r.residual_trace.size(); ++k)
      monotone = monotone && r.residual_trace[k] <= r.residual_trace[k - 1];
    within = within && r.displacements.max < 3.08;
    largest = std::max(largest, r.displacements.max);
    for (const auto& d : r.displacements.rows) sum += d.norm;
    spins += r.displacements.rows.size();
    lo_mean = std::min(lo_mean, r.displacements.mean);
    hi_mean = std::max(hi_mean, r.displacements.mean);
    ++fixtures;
  }
  const double pooled = spins ? sum / static_cast<double>(spins) : 0.0;
  const double t = seconds_since(t0);
  const bool ok = worst_gradient < 1e-5 && monotone && within && fixtures > 0 && pooled >= 0.1 && pooled <= 1.5 &&
                  t < 120.0;
  return {ok, fmt::format("gradient error {:.1e}; {} fixtures: pooled mean {:.3f} A (per fixture {:.3f}..{:.3f}), "
                          "max {:.2f} A, monotone {}",
                          worst_gradient, fixtures, pooled, lo_mean, hi_mean, largest, monotone)};
}

Outcome hyperfine_inversion(const Context&) {
  const FieldConfig field = testing::nominal_field();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> azz(-500e3, 500e3), ap(1e3, 200e3), u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const SpinSpecies s = u(rng) < 0.5 ? default_constants().si29() : default_constants().c13();
    const HyperfineTensor hf{azz(rng), ap(rng), 0.0};
    const double fa = nuclear_transition_frequency(field, s, hf, 1.5);
    const double fb = nuclear_transition_frequency(field, s, hf, -1.5);
    const HyperfineTensor back = invert_hyperfine(fa, fb, field, s, 1.5, -1.5);
    worst = std::max({worst, std::abs(back.a_zz / hf.a_zz - 1.0), std::abs(back.a_perp() / hf.a_zx - 1.0)});
  }

  // Least-squares slope of log|f2 - exact| against log A_perp.
  const SpinSpecies si = default_constants().si29();
  std::vector<double> x, y;
  for (double perp = 5e3; perp <= 80e3; perp *= std::sqrt(2.0)) {
    const HyperfineTensor hf{60e3, perp, 0.0};
    const double exact = nuclear_transition_frequency(field, si, hf, -1.5);
    const double f2 = std::abs(nuclear_frequency_perturbative(field, si, hf, -1.5, 2));
    x.push_back(std::log(perp));
    y.push_back(std::log(std::abs(f2 - exact)));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n, my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  return {worst < 1e-6 && std::abs(slope - 4.0) <= 0.3,
          fmt::format("round-trip error {:.1e} over 1000 pairs; log-log slope {:.3f}", worst, slope)};
}

Outcome calibration_arithmetic(const Context&) {
  const auto g = g_factor_from_delta_b(-1.53, 0.6, 1960.9, -2.0028);
  const double g4 = std::round(g.g_factor * 1e4) / 1e4;
  const double s4 = std::round(g.g_uncertainty * 1e4) / 1e4;
  const double b_rot = transverse_field_from_misalignment(1960.9, 0.037, 0.0);
  const double b_tilt = transverse_field_from_misalignment(1960.9, 0.0, 0.056);
  const double b_both = transverse_field_from_misalignment(1960.9, 0.037, 0.056);
  const bool ok = g4 == -2.0012 && s4 == 0.0006 && std::abs(b_rot - 1.3) <= 0.05 && std::abs(b_tilt - 1.9) <= 0.05 &&
                  std::abs(b_both - 2.3) <= 0.05;
  return {ok, fmt::format("g = {:.4f} +- {:.4f}; transverse {:.2f} / {:.2f} / {:.2f} G", g.g_factor, g.g_uncertainty,
                          b_rot, b_tilt, b_both)};
}

Outcome telegraph_pipeline(const Context& ctx) {
  const auto t0 = Clock::now();
  const TelegraphSpec spec;
  int within = 0;
  double worst_identity = 0.0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto trace = emit_telegraph(spec, seed);
    const TelegraphResult r = analyze_telegraph(trace.trace, 5, 1295.0);
    const bool bd = std::abs(r.bright_to_dark.rate - spec.rate_bright_to_dark) <= 3.0 * r.bright_to_dark.uncertainty;
    const bool db = std::abs(r.dark_to_bright.rate - spec.rate_dark_to_bright) <= 3.0 * r.dark_to_bright.uncertainty;
    within += bd && db;
    const auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    worst_identity = std::max({worst_identity, std::abs(r.bright_to_dark.rate * mean(r.dwells.bright) - 1.0),
                               std::abs(r.dark_to_bright.rate * mean(r.dwells.dark) - 1.0)});
  }

  // Window sweep on the shipped trace: every estimate within two combined
  // standard errors of the default window.
  const TimeTrace shipped = io::trace_from_csv(io::read_text_file(ctx.fixtures / "telegraph" / "trace_seed_01.csv"));
  const TelegraphResult ref = analyze_telegraph(shipped, 5, 1295.0);
  bool stable = true;
  for (int window : {1, 3, 9}) {
    const TelegraphResult r = analyze_telegraph(shipped, window, 1295.0);
    auto close = [](const RateEstimate& a, const RateEstimate& b) {
      return std::abs(a.rate - b.rate) <= 2.0 * std::hypot(a.uncertainty, b.uncertainty);
    };
    stable = stable && close(r.bright_to_dark, ref.bright_to_dark) && close(r.dark_to_bright, ref.dark_to_bright);
  }
  const double t = seconds_since(t0);
  return {within >= 95 && worst_identity <= 1e-9 && stable && t < 60.0,
          fmt::format("{}/100 runs within 3 SE; rate x mean dwell off by {:.1e}; window sweep stable: {}", within,
                      worst_identity, stable)};
}

Outcome ddrf_calculators(const Context&) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> f(50e3, 2e6), tau(2e-6, 60e-6), omega(100.0, 20e3);
  double worst_identity = 0.0, worst_antisym = 0.0, worst_linear = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double f0 = f(rng), f1 = f(rng), frf = f(rng), t = tau(rng), w = omega(rng);
    const double delta = ddrf_phase_update(f0, f1, frf, t) - pi;
    worst_identity = std::max(worst_identity, std::abs(ddrf_resonance_condition(delta, f0, f1, frf, t)));
    const double a = effective_rabi(w, f0, f1, frf, t), b = effective_rabi(w, f1, f0, frf, t);
    worst_antisym = std::max(worst_antisym, std::abs(a + b) / std::max(std::abs(a), 1e-300));

    SequenceParams p{t, 2, frf, w, f0, f1};
    const double per_pair = rotation_angle(p).theta;
    for (int n = 4; n <= 64; n += 2) {
      p.pulses = n;
      const double theta = rotation_angle(p).theta;
      if (per_pair != 0.0) worst_linear = std::max(worst_linear, std::abs(theta / (per_pair * n / 2.0) - 1.0));
    }
  }

  // Resonance locus: for each f_rf, find the phase that satisfies the
  // condition by bisection, then fit a line.
  const double f0 = 420e3, f1 = 440e3, t = 20e-6, centre = 0.5 * (f0 + f1);
  std::vector<double> xs, ys;
  for (double frf = centre - 10e3; frf <= centre + 10e3; frf += 500.0) {
    double lo = -pi + 1e-9, hi = pi;
    auto g = [&](double d) { return ddrf_resonance_condition(d, f0, f1, frf, t); };
    const double target = 2 * pi * (f0 + f1 - 2 * frf) * t;
    lo = std::max(lo, target - 1.0);
    hi = std::min(hi, target + 1.0);
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (g(lo) * g(mid) <= 0.0 ? hi : lo) = mid;
    }
    xs.push_back(frf);
    ys.push_back(0.5 * (lo + hi));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n, my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  const bool ok = worst_identity < 1e-9 && worst_antisym < 1e-12 && worst_linear < 1e-12 && r2 > 0.999;
  return {ok, fmt::format("identity {:.1e} rad, antisymmetry {:.1e}, N-linearity {:.1e}, locus R^2 {:.6f}",
                          worst_identity, worst_antisym, worst_linear, r2)};
}

std::map<std::string, std::string> read_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = io::read_text_file(e.path());
  return out;
}

Outcome determinism(const Context& ctx) {
  if (ctx.cli.empty()) return {false, "no --cli given"};
  const fs::path a = ctx.work / "reproduce_a", b = ctx.work / "reproduce_b";
  fs::remove_all(a);
  fs::remove_all(b);
  const std::string first = fmt::format("\"{}\" -o \"{}\" reproduce --seed 11 --noise 0.2 > /dev/null 2>&1", ctx.cli,
                                        a.string());
  const std::string second = fmt::format("\"{}\" -o \"{}\" --config \"{}\" reproduce > /dev/null 2>&1", ctx.cli,
                                         b.string(), (a / "manifest.json").string());
  const int code_a = std::system(first.c_str());
  if (!fs::exists(a / "manifest.json")) return {false, "first run wrote no manifest"};
  const int code_b = std::system(second.c_str());
  const auto ta = read_tree(a), tb = read_tree(b);
  std::vector<std::string> differing;
  for (const auto& [name, content] : ta) {
    const auto it = tb.find(name);
    if (it == tb.end() || it->second != content) differing.push_back(name);
  }
  const bool ok = code_a == code_b && ta.size() == tb.size() && ta.size() >= 4 && differing.empty();
  return {ok, differing.empty() ? fmt::format("{} files byte-identical", ta.size())
                                : fmt::format("differ: {}", fmt::join(differing, ", "))};
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome(const Context&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spinloc acceptance criteria"};
  Context ctx;
  std::vector<int> expect_fail, only;
  std::string work = (fs::temp_directory_path() / "spinloc_acceptance").string();
  app.add_option("--cli", ctx.cli, "spinloc executable for the determinism check");
  app.add_option("--work-dir", work, "Scratch directory");
  app.add_option("--expect-fail", expect_fail, "Criteria known to fail");
  app.add_option("--only", only, "Run only these criteria");
  CLI11_PARSE(app, argc, argv);
  ctx.work = work;
  fs::create_directories(ctx.work);

  const std::vector<Criterion> criteria{
      {1, "dipolar formula", dipolar_formula},
      {2, "perturbation vs exact", perturbation_vs_exact},
      {3, "second order vs exact", second_order_vs_exact},
      {4, "placement round trip", placement_round_trip},
      {5, "ambiguity honesty", ambiguity_honesty},
      {6, "refinement", refinement},
      {7, "hyperfine inversion", hyperfine_inversion},
      {8, "calibration arithmetic", calibration_arithmetic},
      {9, "telegraph pipeline", telegraph_pipeline},
      {10, "DDRF calculators", ddrf_calculators},
      {11, "determinism", determinism},
  };

  int unexpected = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run(ctx);
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const bool expected_failure = std::find(expect_fail.begin(), expect_fail.end(), c.id) != expect_fail.end();
    std::string note;
    if (!o.pass && expected_failure) note = " [expected failure]";
    if (o.pass && expected_failure) note = " [listed as expected failure but passed]";
    if (!o.pass && !expected_failure) ++unexpected;
    fmt::print("{} {:>2} {:<24} {:7.2f} s  {}{}\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
               o.detail, note);
    std::fflush(stdout);
  }
  return unexpected == 0 ? 0 : 1;
}
