#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "spinloc/error.hpp"
#include "spinloc/placement.hpp"
#include "spinloc/synth.hpp"

using namespace spinloc;

namespace {

const Lattice kLattice;

// Post-hoc checker with its own copy of the dipolar formula. It shares no
// code with the search.
double independent_half_coupling(const Vec3& p, const Vec3& q, double gamma_a, double gamma_b) {
  const double mu0_over_4pi = 1.25663706212e-6 / (4.0 * 3.14159265358979323846);
  const double alpha = mu0_over_4pi * 6.62607015e-34 * gamma_a * gamma_b * 1e30;
  const double dx = q.x() - p.x(), dy = q.y() - p.y(), dz = q.z() - p.z();
  const double r2 = dx * dx + dy * dy + dz * dz;
  return 0.5 * std::abs(alpha * (3.0 * dz * dz / r2 - 1.0) / (r2 * std::sqrt(r2)));
}

double gamma_of(const std::string& label) { return label[0] == 'C' ? 10.7084e6 : -8.465e6; }

bool satisfies_all(const Assignment& a, const std::vector<CouplingMeasurement>& ms, const PlacementConfig& config) {
  for (const auto& m : ms) {
    if (m.f_hz < config.min_detectable) continue;
    const double f = independent_half_coupling(a.at(m.spin_a).position, a.at(m.spin_b).position, gamma_of(m.spin_a),
                                               gamma_of(m.spin_b));
    if (std::abs(f - m.f_hz) > tolerance_for_pair(m.spin_a, m.spin_b, m.f_hz, config) + 1e-9) return false;
  }
  return true;
}

CouplingMeasurement exact(const std::string& a, const LatticeSite& sa, const std::string& b, const LatticeSite& sb) {
  return {a, b, independent_half_coupling(sa.position, sb.position, gamma_of(a), gamma_of(b)), 0.2,
          SubspaceMode::Averaged};
}

// First Si site, in build_lattice order, coupled to Si1 within [lo, hi] Hz.
LatticeSite si_coupled_to_anchor(double lo, double hi) {
  const Vec3 anchor = kLattice.position(kLattice.si1());
  for (const auto& s : build_lattice({}, 12.0)) {
    if (s.species != Sublattice::Si || s.index == kLattice.si1()) continue;
    const double f = independent_half_coupling(anchor, s.position, -8.465e6, -8.465e6);
    if (f >= lo && f <= hi) return s;
  }
  FAIL("no site in range");
  return {};
}

bool contains(const std::vector<LatticeSite>& sites, const SiteIndex& idx) {
  return std::any_of(sites.begin(), sites.end(), [&](const LatticeSite& s) { return s.index == idx; });
}

bool truth_among(const PlacementResult& r, const Assignment& truth) {
  return std::any_of(r.solutions.begin(), r.solutions.end(),
                     [&](const PlacementSolution& s) { return assignments_equivalent(s.assignment, truth, kLattice); });
}

}  // namespace

TEST_CASE("tolerance_for_pair") {
  const PlacementConfig config = strong_pair_placement_config();
  CHECK(tolerance_for_pair("Si1", "Si2", 150.0, config) == 3.0);
  CHECK(tolerance_for_pair("Si2", "Si1", 150.0, config) == 3.0);
  CHECK(tolerance_for_pair("C1", "Si10", 80.06, config) == doctest::Approx(4.003));
  CHECK(tolerance_for_pair("Si8", "Si9", 4.31, config) == 0.6);
  CHECK(tolerance_for_pair("Si8", "Si9", 4.31, config, 1.1) == 1.1);
  CHECK(tolerance_for_pair("Si8", "Si9", 4.31, config, 0.2) == 0.6);
  PlacementConfig with_bounds = config;
  with_bounds.deviation_bounds[make_pair_key("Si8", "Si9")] = 0.9;
  CHECK(tolerance_for_pair("Si9", "Si8", 4.31, with_bounds) == 0.9);
}

TEST_CASE("measurement and config validation") {
  CHECK_THROWS_AS((CouplingMeasurement{"Si1", "Si1", 4.0}).validate(), Error);
  CHECK_THROWS_AS((CouplingMeasurement{"Si1", "Si2", -1.0}).validate(), Error);
  CHECK_THROWS_AS((CouplingMeasurement{"Si1", "Si2", 4.0, 0.0}).validate(), Error);
  CHECK(species_of_label("Si12") == Sublattice::Si);
  CHECK(species_of_label("C3") == Sublattice::C);
  CHECK_THROWS_AS(species_of_label("N1"), Error);
  CHECK(subspace_mode_from_string(to_string(SubspaceMode::MinusThreeHalves)) == SubspaceMode::MinusThreeHalves);
  PlacementConfig bad;
  bad.tolerance_default = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = PlacementConfig{};
  bad.anchor_label = "C1";
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("candidate_sites contains the true site and shrinks with the tolerance") {
  const LatticeSite si1 = kLattice.site(kLattice.si1());
  const LatticeSite truth = si_coupled_to_anchor(6.0, 30.0);
  const Assignment placed{{"Si1", si1}};
  const std::vector<CouplingMeasurement> ms{exact("Si1", si1, "Si5", truth)};
  std::size_t previous = static_cast<std::size_t>(-1);
  for (double tol : {2.0, 1.0, 0.6, 0.1, 1e-3, 1e-9}) {
    CAPTURE(tol);
    PlacementConfig config;
    config.tolerance_default = tol;
    config.relative_tolerance_strong = 0.0;
    const auto sites = candidate_sites(placed, "Si5", ms, kLattice, config);
    CHECK(contains(sites, truth.index));
    CHECK(sites.size() <= previous);
    for (const auto& s : sites) CHECK(s.species == Sublattice::Si);
    previous = sites.size();
  }
}

TEST_CASE("a split spin has no common candidate site") {
  // Two 4.31 Hz and 4.87 Hz couplings that no single site reproduces, the
  // signature of one label standing for two spins.
  const Assignment placed{{"Si1", kLattice.site(kLattice.si1())},
                          {"Si9", kLattice.site({1, 0, 0, 3})},
                          {"Si12", kLattice.site({0, 1, 0, 1})}};
  const CouplingMeasurement to9{"Si8", "Si9", 4.31};
  const CouplingMeasurement to12{"Si8", "Si12", 4.87};
  const PlacementConfig config = strong_pair_placement_config();
  CHECK_FALSE(candidate_sites(placed, "Si8", {to9}, kLattice, config).empty());
  CHECK_FALSE(candidate_sites(placed, "Si8", {to12}, kLattice, config).empty());
  CHECK(candidate_sites(placed, "Si8", {to9, to12}, kLattice, config).empty());

  // Brute-force confirmation over every Si site within reach of both.
  for (const auto& s : build_lattice({}, 25.0)) {
    if (s.species != Sublattice::Si) continue;
    const double f9 = independent_half_coupling(placed.at("Si9").position, s.position, -8.465e6, -8.465e6);
    const double f12 = independent_half_coupling(placed.at("Si12").position, s.position, -8.465e6, -8.465e6);
    CHECK_FALSE((std::abs(f9 - 4.31) <= 0.6 && std::abs(f12 - 4.87) <= 0.6));
  }
}

TEST_CASE("candidate_sites errors and exclusions") {
  const Assignment placed{{"Si1", kLattice.site(kLattice.si1())}};
  const PlacementConfig config;
  try {
    candidate_sites(placed, "Si7", {{"Si7", "Si8", 10.0}}, kLattice, config);
    FAIL("expected connectivity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Connectivity);
  }
  // Below min_detectable counts as absent.
  CHECK_THROWS_AS(candidate_sites(placed, "Si7", {{"Si1", "Si7", 2.0}}, kLattice, config), Error);
  CHECK_THROWS_AS(candidate_sites(placed, "Si1", {{"Si1", "Si7", 20.0}}, kLattice, config), Error);

  const LatticeSite si1 = kLattice.site(kLattice.si1());
  const LatticeSite a = kLattice.site({1, 0, 0, 3});
  const Assignment two{{"Si1", si1}, {"Si2", a}};
  const std::vector<CouplingMeasurement> ms{exact("Si1", si1, "Si3", si_coupled_to_anchor(4.0, 8.0))};
  PlacementConfig excl;
  excl.weak_coupling_exclusion = true;
  const auto all = candidate_sites(two, "Si3", ms, kLattice, config);
  const auto fewer = candidate_sites(two, "Si3", ms, kLattice, excl);
  CHECK(fewer.size() < all.size());
  for (const auto& s : fewer) {
    CHECK(contains(all, s.index));
    CHECK(independent_half_coupling(a.position, s.position, -8.465e6, -8.465e6) <= 2.0 * excl.min_detectable);
  }
}

TEST_CASE("order_heuristic") {
  SUBCASE("star graph is ordered by coupling strength then label") {
    const std::vector<CouplingMeasurement> ms{
        {"Si1", "Si4", 10.0}, {"Si1", "Si3", 20.0}, {"Si1", "Si2", 10.0}, {"Si1", "C1", 5.0}};
    const auto order = order_heuristic(ms);
    CHECK(order == std::vector<std::string>{"Si1", "Si3", "Si2", "Si4", "C1"});
    CHECK(order_heuristic(ms) == order);
  }
  SUBCASE("a clique is finished before crossing a bridge") {
    std::vector<CouplingMeasurement> ms;
    const std::vector<std::string> a{"Si1", "Si2", "Si3", "Si4"}, b{"Si5", "Si6", "Si7", "Si8"};
    for (std::size_t x = 0; x < 4; ++x)
      for (std::size_t y = x + 1; y < 4; ++y) {
        ms.push_back({a[x], a[y], 6.0});
        ms.push_back({b[x], b[y], 6.0});
      }
    ms.push_back({"Si4", "Si5", 50.0});
    const auto order = order_heuristic(ms);
    REQUIRE(order.size() == 8);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::find(a.begin(), a.end(), order[k]) != a.end());
  }
  SUBCASE("four sub-clusters of 5 to 7 are completed one at a time") {
    const int sizes[] = {6, 5, 7, 7};
    std::vector<std::vector<std::string>> groups;
    int next = 1;
    for (int size : sizes) {
      groups.emplace_back();
      for (int k = 0; k < size; ++k) groups.back().push_back("Si" + std::to_string(next++));
    }
    std::vector<CouplingMeasurement> ms;
    for (const auto& g : groups)
      for (std::size_t x = 0; x < g.size(); ++x)
        for (std::size_t y = x + 1; y < g.size(); ++y) ms.push_back({g[x], g[y], 5.0 + static_cast<double>(x + y)});
    for (std::size_t c = 0; c + 1 < groups.size(); ++c) ms.push_back({groups[c].back(), groups[c + 1].front(), 40.0});
    const auto order = order_heuristic(ms);
    std::vector<int> group_of;
    for (const auto& label : order)
      for (std::size_t c = 0; c < groups.size(); ++c)
        if (std::find(groups[c].begin(), groups[c].end(), label) != groups[c].end()) group_of.push_back(static_cast<int>(c));
    CHECK(std::is_sorted(group_of.begin(), group_of.end()));
  }
  SUBCASE("unreachable labels are listed") {
    const std::vector<CouplingMeasurement> ms{{"Si1", "Si2", 10.0}, {"Si3", "Si4", 10.0}};
    try {
      order_heuristic(ms);
      FAIL("expected connectivity error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Connectivity);
      CHECK(std::string(e.what()).find("Si3, Si4") != std::string::npos);
    }
  }
}

TEST_CASE("place_all on noiseless synthetic clusters") {
  const PlacementConfig config = strong_pair_placement_config();
  SUBCASE("unique recovery for seed 5") {
    const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), 5);
    const auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, 0.0}, 77);
    const PlacementResult r = place_all(ms, kLattice, config);
    REQUIRE(r.solutions.size() == 1);
    CHECK(assignments_equivalent(r.solutions[0].assignment, cluster.assignment(), kLattice));
    CHECK(r.solutions[0].residual < 1e-9);
    CHECK(r.ambiguous.empty());
    CHECK(r.branch_history.size() == 25);
    CHECK(r.branch_history.back() == 1);
    CHECK(r.symmetry_order == 6);
    CHECK(satisfies_all(r.solutions[0].assignment, ms, config));
  }
  SUBCASE("the truth always survives, every solution is sound") {
    for (std::uint64_t seed : {1, 2, 3, 4}) {
      CAPTURE(seed);
      const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), seed);
      const auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, 0.0}, seed);
      for (double tol : {0.6, 0.05}) {
        PlacementConfig c = config;
        c.tolerance_default = tol;
        const PlacementResult r = place_all(ms, kLattice, c);
        CHECK(truth_among(r, cluster.assignment()));
        for (const auto& sol : r.solutions) {
          CHECK(satisfies_all(sol.assignment, ms, c));
          std::set<SiteIndex> distinct;
          for (const auto& [label, site] : sol.assignment) {
            CHECK(site.species == species_of_label(label));
            distinct.insert(site.index);
          }
          CHECK(distinct.size() == sol.assignment.size());
        }
      }
    }
  }
}

TEST_CASE("place_all determinism, symmetry accounting and monotonicity") {
  const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), 1);
  auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, 0.2}, 11);
  const PlacementConfig config = strong_pair_placement_config();
  const PlacementResult a = place_all(ms, kLattice, config);
  const PlacementResult b = place_all(ms, kLattice, config);
  REQUIRE(a.solutions.size() == b.solutions.size());
  CHECK(a.branch_history == b.branch_history);
  for (std::size_t s = 0; s < a.solutions.size(); ++s) {
    for (const auto& [label, site] : a.solutions[s].assignment)
      CHECK(b.solutions[s].assignment.at(label).index == site.index);
    CHECK(a.solutions[s].residual == b.solutions[s].residual);
  }

  PlacementConfig raw = config;
  raw.reduce_symmetry = false;
  const PlacementResult r = place_all(ms, kLattice, raw);
  std::size_t total = 0;
  for (const auto& sol : a.solutions) total += sol.multiplicity;
  CHECK(r.solutions.size() == total);
  CHECK(r.branch_history == a.branch_history_raw);
  CHECK(r.symmetry_order == 1);

  // One more constraint can only remove survivors.
  const std::size_t before = a.solutions.size();
  const auto truth = cluster.assignment();
  std::vector<CouplingMeasurement> more = ms;
  more.push_back({"Si1", cluster.spins.back().label,
                  independent_half_coupling(truth.at("Si1").position, cluster.spins.back().site.position, -8.465e6,
                                            gamma_of(cluster.spins.back().label)),
                  0.2, SubspaceMode::Averaged});
  if (more.back().f_hz >= 3.0) {
    more.erase(std::remove_if(more.begin(), more.end() - 1,
                              [&](const CouplingMeasurement& m) {
                                return make_pair_key(m.spin_a, m.spin_b) == make_pair_key(more.back().spin_a, more.back().spin_b);
                              }),
               more.end() - 1);
  }
  PlacementConfig fixed = config;
  fixed.placement_order = a.order;
  try {
    CHECK(place_all(more, kLattice, fixed).solutions.size() <= before);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
  }
}

TEST_CASE("ambiguous spin is reported with every admissible site") {
  const LatticeSite si1 = kLattice.site(kLattice.si1());
  const LatticeSite si2 = kLattice.site({1, 0, 0, 3});
  const LatticeSite si3 = kLattice.site({0, 1, 1, 1});
  std::vector<CouplingMeasurement> ms{exact("Si1", si1, "Si2", si2), exact("Si1", si1, "Si3", si3),
                                      exact("Si2", si2, "Si3", si3), {"Si3", "Si4", 4.0}};
  PlacementConfig config = strong_pair_placement_config();
  config.placement_order = {"Si1", "Si2", "Si3", "Si4"};
  const PlacementResult r = place_all(ms, kLattice, config);
  std::size_t reported = 0;
  for (const auto& amb : r.ambiguous)
    if (amb.label == "Si4") reported = amb.sites.size();
  CHECK(reported > 1);
  CHECK(r.solutions.size() >= reported);
}

TEST_CASE("errors: capacity and infeasibility name the step") {
  const SyntheticCluster cluster = generate_cluster(kLattice, reference_cluster_spec(), 2);
  const auto ms = emit_couplings(cluster, 3.0, {NoiseKind::Gaussian, 0.0}, 2);
  PlacementConfig tight = strong_pair_placement_config();
  tight.max_branches = 1;
  try {
    place_all(ms, kLattice, tight);
    FAIL("expected capacity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Capacity);
    CHECK(std::string(e.what()).find("step") != std::string::npos);
  }

  const std::vector<CouplingMeasurement> impossible{{"Si1", "Si2", 5000.0}};
  try {
    place_all(impossible, kLattice, PlacementConfig{});
    FAIL("expected infeasibility");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Infeasible);
    CHECK(std::string(e.what()).find("Si2") != std::string::npos);
  }

  PlacementConfig wrong_anchor;
  wrong_anchor.placement_order = {"Si2", "Si1"};
  CHECK_THROWS_AS(place_all({{"Si1", "Si2", 20.0}}, kLattice, wrong_anchor), Error);
}

TEST_CASE("C1-Si10 reported at 185.61 Hz and 186.3 Hz points at the same sites") {
  const PlacementConfig config = strong_pair_placement_config();
  const Assignment placed{{"Si10", kLattice.site(kLattice.si1())}};
  const auto a = candidate_sites(placed, "C1", {{"C1", "Si10", 185.61}}, kLattice, config);
  const auto b = candidate_sites(placed, "C1", {{"C1", "Si10", 186.3}}, kLattice, config);
  REQUIRE_FALSE(a.empty());
  std::set<SiteIndex> sa, sb;
  for (const auto& s : a) sa.insert(s.index);
  for (const auto& s : b) sb.insert(s.index);
  CHECK(sa == sb);
  CHECK(tolerance_for_pair("C1", "Si10", 185.61, config) > 186.3 - 185.61);
  for (const auto& s : a) CHECK(s.species == Sublattice::C);
}
