#include <doctest.h>

#include <cmath>
#include <random>

#include "spinloc/error.hpp"
#include "spinloc/refine.hpp"
#include "spinloc/spinphys.hpp"
#include "spinloc/synth.hpp"

using namespace spinloc;

namespace {

const Lattice kLattice;

PlacementSolution truth_solution(const SyntheticCluster& cluster) {
  PlacementSolution s;
  s.assignment = cluster.assignment();
  return s;
}

struct RandomConfig {
  std::vector<std::string> labels;
  std::vector<Vec3> positions;
  std::vector<CouplingMeasurement> measurements;
};

// Six spins inside a 6 A box with every pair measured at a perturbed value.
RandomConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> box(-3.0, 3.0), f(3.0, 40.0);
  RandomConfig c;
  c.labels = {"Si1", "Si2", "Si3", "C1", "Si4", "C2"};
  while (c.positions.size() < c.labels.size()) {
    const Vec3 p(box(rng), box(rng), box(rng));
    bool ok = true;
    for (const auto& q : c.positions) ok = ok && (p - q).norm() > 1.5;
    if (ok) c.positions.push_back(p);
  }
  for (std::size_t a = 0; a < c.labels.size(); ++a)
    for (std::size_t b = a + 1; b < c.labels.size(); ++b) c.measurements.push_back({c.labels[a], c.labels[b], f(rng)});
  return c;
}

}  // namespace

TEST_CASE("analytic gradient matches central differences") {
  std::mt19937_64 rng(17);
  const double h = 1e-4;
  for (int trial = 0; trial < 100; ++trial) {
    const RandomConfig c = random_config(rng);
    const ResidualGradient g = residual_and_gradient(c.labels, c.positions, c.measurements);
    Eigen::VectorXd fd(g.gradient.size());
    for (std::size_t k = 0; k < c.positions.size(); ++k) {
      for (int axis = 0; axis < 3; ++axis) {
        auto plus = c.positions, minus = c.positions;
        plus[k](axis) += h;
        minus[k](axis) -= h;
        fd(static_cast<Eigen::Index>(3 * k) + axis) =
            (residual_and_gradient(c.labels, plus, c.measurements).residual -
             residual_and_gradient(c.labels, minus, c.measurements).residual) /
            (2.0 * h);
      }
    }
    CHECK((g.gradient - fd).norm() / g.gradient.norm() < 1e-5);
  }
}

TEST_CASE("residual is translation invariant and its gradient sums to zero per axis") {
  std::mt19937_64 rng(23);
  const RandomConfig c = random_config(rng);
  const ResidualGradient g = residual_and_gradient(c.labels, c.positions, c.measurements);
  auto shifted = c.positions;
  for (auto& p : shifted) p += Vec3(0.3, -1.2, 2.5);
  CHECK(residual_and_gradient(c.labels, shifted, c.measurements).residual == doctest::Approx(g.residual).epsilon(1e-10));
  for (int axis = 0; axis < 3; ++axis) {
    double sum = 0.0;
    for (std::size_t k = 0; k < c.positions.size(); ++k) sum += g.gradient(static_cast<Eigen::Index>(3 * k) + axis);
    CHECK(std::abs(sum) < 1e-9 * g.gradient.norm());
  }
}

TEST_CASE("coincident positions are a domain error") {
  const std::vector<std::string> labels{"Si1", "Si2"};
  const std::vector<Vec3> p{Vec3::Zero(), Vec3::Zero()};
  try {
    residual_and_gradient(labels, p, {{"Si1", "Si2", 5.0}});
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
}

TEST_CASE("noiseless truth is already optimal") {
  const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), 4);
  const auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, 0.0}, 4);
  std::vector<std::string> labels;
  std::vector<Vec3> positions;
  for (const auto& s : cluster.spins) {
    labels.push_back(s.label);
    positions.push_back(s.site.position);
  }
  // Unrounded couplings so the stationary point is exact.
  const Assignment truth = cluster.assignment();
  std::vector<CouplingMeasurement> exact;
  for (const auto& m : ms) {
    const auto& a = truth.at(m.spin_a);
    const auto& b = truth.at(m.spin_b);
    exact.push_back({m.spin_a, m.spin_b,
                     0.5 * std::abs(dipolar_coupling(a.position, b.position,
                                                     spin_species_of_label(m.spin_a, default_constants()),
                                                     spin_species_of_label(m.spin_b, default_constants())))});
  }
  const ResidualGradient g = residual_and_gradient(labels, positions, exact);
  CHECK(g.residual < 1e-20);
  std::vector<CouplingMeasurement> shifted = exact;
  for (auto& m : shifted) m.f_hz += 1.0;
  const double scale = residual_and_gradient(labels, positions, shifted).gradient.norm();
  CHECK(g.gradient.norm() < 1e-8 * scale);

  const RefinementResult r = refine(truth_solution(cluster), ms);
  CHECK(r.displacements.max < 1e-4);
  CHECK(r.residual <= r.initial_residual);
}

TEST_CASE("refinement on noisy data") {
  const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), 6);
  const auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, 0.2}, 99);
  const RefinementResult r = refine(truth_solution(cluster), ms);
  CHECK(r.residual < r.initial_residual);
  for (std::size_t k = 1; k < r.residual_trace.size(); ++k) CHECK(r.residual_trace[k] <= r.residual_trace[k - 1]);
  CHECK(r.displacements.max < 3.08);
  CHECK(r.displacements.mean > 0.0);
  CHECK(r.positions.at("Si1") == cluster.spins[0].site.position);
  CHECK_FALSE(r.gauge_label.empty());
  CHECK(r.signs_consistent);
  CHECK(r.rank == r.parameters);
  CHECK_FALSE(r.underdetermined);
  CHECK(std::isfinite(r.hessian_condition));
  CHECK(r.parameters == 3 * 24 - 1);
}

TEST_CASE("single pair reaches zero residual and is flagged underdetermined") {
  PlacementSolution s;
  s.assignment["Si1"] = kLattice.site(kLattice.si1());
  s.assignment["Si2"] = kLattice.site({1, 0, 0, 3});
  const double f = 0.5 * std::abs(dipolar_coupling(s.assignment["Si1"].position, s.assignment["Si2"].position,
                                                   default_constants().si29(), default_constants().si29()));
  const RefinementResult r = refine(s, {{"Si1", "Si2", f + 0.7}});
  CHECK(r.initial_residual == doctest::Approx(0.49));
  CHECK(r.residual < 1e-12);
  CHECK(r.parameters == 2);
  CHECK(r.rank == 1);
  CHECK(r.underdetermined);
}

TEST_CASE("refine requires the anchor") {
  PlacementSolution s;
  s.assignment["Si2"] = kLattice.site({1, 0, 0, 3});
  s.assignment["Si3"] = kLattice.site({0, 1, 1, 1});
  CHECK_THROWS_AS(refine(s, {{"Si2", "Si3", 5.0}}), Error);
}

TEST_CASE("displacement_report") {
  const std::map<std::string, Vec3> a{{"Si1", Vec3(0, 0, 5)}, {"Si2", Vec3(1, 2, 3)}, {"C1", Vec3(-1, 0, 2)}};
  const DisplacementReport same = displacement_report(a, a);
  for (const auto& row : same.rows) CHECK(row.norm == 0.0);
  CHECK(same.mean == 0.0);
  CHECK(same.max == 0.0);

  auto b = a;
  b["Si2"] += Vec3(1, 0, 0);
  const DisplacementReport one = displacement_report(a, b);
  for (const auto& row : one.rows) {
    if (row.label == "Si2") {
      CHECK(row.delta == Vec3(1, 0, 0));
      CHECK(row.norm == 1.0);
    } else {
      CHECK(row.norm == 0.0);
    }
  }
  CHECK(one.max == 1.0);
  CHECK(one.max_label == "Si2");
  CHECK(one.mean == doctest::Approx(1.0 / 3.0));

  auto missing = a;
  missing.erase("C1");
  missing["C2"] = Vec3::Zero();
  CHECK_THROWS_AS(displacement_report(a, missing), Error);
}

TEST_CASE("doubling the noise roughly doubles the RMS displacement") {
  double sum_small = 0.0, sum_large = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), seed);
    for (double amplitude : {0.1, 0.2}) {
      const auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, amplitude}, 500 + seed);
      const RefinementResult r = refine(truth_solution(cluster), ms);
      double ss = 0.0;
      for (const auto& row : r.displacements.rows) ss += row.norm * row.norm;
      const double rms = std::sqrt(ss / static_cast<double>(r.displacements.rows.size()));
      (amplitude < 0.15 ? sum_small : sum_large) += rms;
    }
  }
  const double ratio = sum_large / sum_small;
  CHECK(ratio >= 1.4);
  CHECK(ratio <= 2.8);
}
