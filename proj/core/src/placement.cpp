#include "spinloc/placement.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include <fmt/format.h>

#include "spinloc/error.hpp"
#include "spinloc/spinphys.hpp"
#include "spinloc/symmetry.hpp"

namespace spinloc {

std::string_view to_string(SubspaceMode mode) noexcept {
  switch (mode) {
    case SubspaceMode::PlusThreeHalves: return "ms_plus_3_2";
    case SubspaceMode::MinusThreeHalves: return "ms_minus_3_2";
    case SubspaceMode::Averaged: return "averaged";
  }
  return "averaged";
}

SubspaceMode subspace_mode_from_string(std::string_view text) {
  if (text == "ms_plus_3_2") return SubspaceMode::PlusThreeHalves;
  if (text == "ms_minus_3_2") return SubspaceMode::MinusThreeHalves;
  if (text == "averaged") return SubspaceMode::Averaged;
  fail(ErrorKind::Format, fmt::format("unknown subspace mode '{}'", text));
}

void CouplingMeasurement::validate() const {
  require(!spin_a.empty() && !spin_b.empty(), ErrorKind::Format, "coupling labels must be non-empty");
  require(spin_a != spin_b, ErrorKind::Format, fmt::format("coupling of '{}' with itself", spin_a));
  require(std::isfinite(f_hz) && f_hz >= 0.0, ErrorKind::Format,
          fmt::format("coupling {}-{}: f must be finite and >= 0", spin_a, spin_b));
  require(std::isfinite(sigma_hz) && sigma_hz > 0.0, ErrorKind::Format,
          fmt::format("coupling {}-{}: sigma must be positive", spin_a, spin_b));
  species_of_label(spin_a);
  species_of_label(spin_b);
}

PairKey make_pair_key(const std::string& a, const std::string& b) {
  return a < b ? PairKey{a, b} : PairKey{b, a};
}

Sublattice species_of_label(std::string_view label) {
  if (label.starts_with("Si")) return Sublattice::Si;
  if (label.starts_with("C")) return Sublattice::C;
  fail(ErrorKind::Format, fmt::format("cannot infer species of spin label '{}' (expected Si... or C...)", label));
}

SpinSpecies spin_species_of_label(std::string_view label, const ConstantsTable& constants) {
  return species_of_label(label) == Sublattice::Si ? constants.si29() : constants.c13();
}

void PlacementConfig::validate() const {
  require(tolerance_default > 0.0, ErrorKind::InvalidArgument, "tolerance_default must be positive");
  require(strong_threshold > 0.0, ErrorKind::InvalidArgument, "strong_threshold must be positive");
  require(relative_tolerance_strong >= 0.0, ErrorKind::InvalidArgument, "relative tolerance must be >= 0");
  require(min_detectable >= 0.0, ErrorKind::InvalidArgument, "min_detectable must be >= 0");
  require(max_branches > 0, ErrorKind::InvalidArgument, "max_branches must be positive");
  for (const auto& [pair, tol] : tolerance_overrides)
    require(tol >= 0.0, ErrorKind::InvalidArgument, fmt::format("negative override for {}-{}", pair.first, pair.second));
  require(species_of_label(anchor_label) == Sublattice::Si, ErrorKind::InvalidArgument, "the anchor must be a Si label");
  constants.validate();
}

PlacementConfig strong_pair_placement_config() {
  PlacementConfig config;
  config.tolerance_overrides[make_pair_key("Si1", "Si2")] = 3.0;
  config.tolerance_overrides[make_pair_key("Si1", "Si12")] = 3.0;
  return config;
}

double tolerance_for_pair(const std::string& a, const std::string& b, double f_hz, const PlacementConfig& config,
                          std::optional<double> sweep_bound) {
  const PairKey key = make_pair_key(a, b);
  double tol = config.tolerance_default;
  if (auto it = config.tolerance_overrides.find(key); it != config.tolerance_overrides.end()) {
    tol = it->second;
  } else if (f_hz > config.strong_threshold) {
    tol = config.relative_tolerance_strong * f_hz;
  }
  if (!sweep_bound) {
    if (auto it = config.deviation_bounds.find(key); it != config.deviation_bounds.end()) sweep_bound = it->second;
  }
  if (sweep_bound && *sweep_bound > tol) tol = *sweep_bound;
  return tol;
}

namespace {

struct Constraint {
  std::size_t ref = 0;
  double f = 0.0;
  double tol = 0.0;
  double alpha = 0.0;
};

struct Exclusion {
  std::size_t ref = 0;
  double alpha = 0.0;
};

struct Step {
  std::string label;
  Sublattice species = Sublattice::Si;
  std::vector<Constraint> constraints;
  std::vector<Exclusion> exclusions;
  std::size_t enum_constraint = 0;
  double reach = 0.0;
};

bool detectable(const CouplingMeasurement& m, const PlacementConfig& config) {
  return m.f_hz >= config.min_detectable;
}

double coupling_magnitude_half(const Vec3& p, const Vec3& q, double alpha) {
  const Vec3 d = q - p;
  const double r2 = d.squaredNorm();
  const double r = std::sqrt(r2);
  return 0.5 * std::abs(alpha / (r2 * r) * (3.0 * d.z() * d.z() / r2 - 1.0));
}

// Builds the constraint list for `label` against the first `placed.size()`
// entries of `order_labels`.
Step make_step(const std::string& label, const std::vector<std::string>& placed,
               const std::vector<CouplingMeasurement>& measurements, const PlacementConfig& config) {
  Step step;
  step.label = label;
  step.species = species_of_label(label);
  const SpinSpecies sp_new = spin_species_of_label(label, config.constants);
  std::set<std::size_t> measured;
  for (std::size_t r = 0; r < placed.size(); ++r) {
    const double alpha = dipolar_prefactor(sp_new, spin_species_of_label(placed[r], config.constants));
    for (const auto& m : measurements) {
      if (!detectable(m, config)) continue;
      if (!((m.spin_a == label && m.spin_b == placed[r]) || (m.spin_b == label && m.spin_a == placed[r]))) continue;
      step.constraints.push_back({r, m.f_hz, tolerance_for_pair(m.spin_a, m.spin_b, m.f_hz, config), alpha});
      measured.insert(r);
    }
    if (config.weak_coupling_exclusion && !measured.contains(r)) step.exclusions.push_back({r, alpha});
  }
  if (step.constraints.empty()) {
    fail(ErrorKind::Connectivity, fmt::format("spin '{}' has no detectable coupling to an already placed spin", label));
  }
  step.reach = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < step.constraints.size(); ++c) {
    const Constraint& k = step.constraints[c];
    if (k.f - k.tol <= 0.0) continue;
    const double reach = std::cbrt(std::abs(k.alpha) / (k.f - k.tol)) * (1.0 + 1e-9);
    if (reach < step.reach) {
      step.reach = reach;
      step.enum_constraint = c;
    }
  }
  require(std::isfinite(step.reach), ErrorKind::InvalidArgument,
          fmt::format("spin '{}': every coupling to the placed set is within its tolerance of zero, so the "
                      "candidate region is unbounded",
                      label));
  return step;
}

class ShellCache {
 public:
  explicit ShellCache(const Lattice& lattice) : lattice_(lattice) {}
  const std::vector<ShellEntry>& get(int basis, Sublattice species, double radius) {
    auto key = std::make_tuple(basis, species == Sublattice::Si ? 0 : 1, radius);
    auto it = cache_.find(key);
    if (it == cache_.end()) it = cache_.emplace(key, lattice_.shell(basis, species, radius)).first;
    return it->second;
  }

 private:
  const Lattice& lattice_;
  std::map<std::tuple<int, int, double>, std::vector<ShellEntry>> cache_;
};

std::vector<SiteIndex> expand(const std::vector<SiteIndex>& placed, const std::vector<Vec3>& positions,
                              const Step& step, const Lattice& lattice, const PlacementConfig& config,
                              ShellCache& shells) {
  const Constraint& e = step.constraints[step.enum_constraint];
  const SiteIndex ref = placed[e.ref];
  std::vector<SiteIndex> out;
  for (const ShellEntry& s : shells.get(ref.basis, step.species, step.reach)) {
    const SiteIndex q{ref.i + s.di, ref.j + s.dj, ref.k + s.dk, s.basis};
    if (lattice.is_vacancy(q)) continue;
    if (std::find(placed.begin(), placed.end(), q) != placed.end()) continue;
    const Vec3 pq = lattice.position(q);
    bool ok = true;
    for (const Constraint& c : step.constraints) {
      if (std::abs(coupling_magnitude_half(positions[c.ref], pq, c.alpha) - c.f) > c.tol) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    for (const Exclusion& x : step.exclusions) {
      if (coupling_magnitude_half(positions[x.ref], pq, x.alpha) > 2.0 * config.min_detectable) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(q);
  }
  return out;
}

std::vector<Vec3> positions_of(const std::vector<SiteIndex>& sites, const Lattice& lattice) {
  std::vector<Vec3> out;
  out.reserve(sites.size() + 1);
  for (const auto& s : sites) out.push_back(lattice.position(s));
  return out;
}

}  // namespace

std::vector<LatticeSite> candidate_sites(const Assignment& placed, const std::string& new_label,
                                         const std::vector<CouplingMeasurement>& measurements,
                                         const Lattice& lattice, const PlacementConfig& config) {
  config.validate();
  require(!placed.contains(new_label), ErrorKind::InvalidArgument, fmt::format("'{}' is already placed", new_label));
  std::vector<std::string> labels;
  std::vector<SiteIndex> sites;
  for (const auto& [label, site] : placed) {
    require(species_of_label(label) == site.species, ErrorKind::InvalidArgument,
            fmt::format("'{}' sits on the wrong sublattice", label));
    labels.push_back(label);
    sites.push_back(site.index);
  }
  const Step step = make_step(new_label, labels, measurements, config);
  ShellCache shells(lattice);
  std::vector<LatticeSite> out;
  for (const SiteIndex& q : expand(sites, positions_of(sites, lattice), step, lattice, config, shells))
    out.push_back(lattice.site(q));
  return out;
}

std::vector<std::string> order_heuristic(const std::vector<CouplingMeasurement>& measurements,
                                         const std::string& anchor, double min_detectable) {
  std::map<std::string, std::map<std::string, double>> adj;
  for (const auto& m : measurements) {
    adj[m.spin_a];
    adj[m.spin_b];
    if (m.f_hz < min_detectable) continue;
    double& ab = adj[m.spin_a][m.spin_b];
    ab = std::max(ab, m.f_hz);
    double& ba = adj[m.spin_b][m.spin_a];
    ba = std::max(ba, m.f_hz);
  }
  require(adj.contains(anchor), ErrorKind::Connectivity, fmt::format("anchor '{}' has no measurements", anchor));

  std::vector<std::string> order{anchor};
  std::set<std::string> done{anchor};
  while (done.size() < adj.size()) {
    const std::string* best = nullptr;
    std::size_t best_links = 0;
    double best_max = -1.0;
    for (const auto& [label, nbrs] : adj) {
      if (done.contains(label)) continue;
      std::size_t links = 0;
      double strongest = -1.0;
      for (const auto& [other, f] : nbrs) {
        if (!done.contains(other)) continue;
        ++links;
        strongest = std::max(strongest, f);
      }
      if (links == 0) continue;
      if (links > best_links || (links == best_links && strongest > best_max)) {
        best = &label;
        best_links = links;
        best_max = strongest;
      }
    }
    if (!best) {
      std::vector<std::string> missing;
      for (const auto& [label, nbrs] : adj)
        if (!done.contains(label)) missing.push_back(label);
      fail(ErrorKind::Connectivity,
           fmt::format("labels unreachable from '{}' through detectable couplings: {}", anchor, fmt::join(missing, ", ")));
    }
    order.push_back(*best);
    done.insert(*best);
  }
  return order;
}

double placement_residual(const Assignment& assignment, const std::vector<CouplingMeasurement>& measurements,
                          const PlacementConfig& config) {
  double sum = 0.0;
  for (const auto& m : measurements) {
    if (!detectable(m, config)) continue;
    auto a = assignment.find(m.spin_a);
    auto b = assignment.find(m.spin_b);
    if (a == assignment.end() || b == assignment.end()) continue;
    const double alpha = dipolar_prefactor(spin_species_of_label(m.spin_a, config.constants),
                                           spin_species_of_label(m.spin_b, config.constants));
    const double d = m.f_hz - coupling_magnitude_half(a->second.position, b->second.position, alpha);
    sum += d * d;
  }
  return sum;
}

PlacementResult place_all(const std::vector<CouplingMeasurement>& measurements, const Lattice& lattice,
                          const PlacementConfig& config) {
  config.validate();
  for (const auto& m : measurements) m.validate();

  PlacementResult result;
  for (const auto& m : measurements)
    if (!detectable(m, config)) ++result.dropped_measurements;

  result.order = config.placement_order.empty()
                     ? order_heuristic(measurements, config.anchor_label, config.min_detectable)
                     : config.placement_order;
  require(!result.order.empty() && result.order.front() == config.anchor_label, ErrorKind::InvalidArgument,
          fmt::format("placement order must start with the anchor '{}'", config.anchor_label));
  {
    std::set<std::string> unique(result.order.begin(), result.order.end());
    require(unique.size() == result.order.size(), ErrorKind::InvalidArgument, "placement order repeats a label");
  }

  std::vector<Step> steps;
  for (std::size_t s = 1; s < result.order.size(); ++s) {
    const std::vector<std::string> placed(result.order.begin(), result.order.begin() + static_cast<std::ptrdiff_t>(s));
    steps.push_back(make_step(result.order[s], placed, measurements, config));
  }

  const AnchorSymmetry symmetry(lattice);
  result.symmetry_order = config.reduce_symmetry ? symmetry.order() : 1;
  auto canonical = [&](const std::vector<SiteIndex>& sites, std::size_t* orbit) {
    if (config.reduce_symmetry) return symmetry.canonical(sites, orbit);
    *orbit = 1;
    return sites;
  };

  ShellCache shells(lattice);
  std::map<std::vector<SiteIndex>, std::size_t> current{{{lattice.si1()}, 1}};
  result.branch_history.push_back(1);
  result.branch_history_raw.push_back(1);

  for (std::size_t s = 0; s < steps.size(); ++s) {
    const Step& step = steps[s];
    std::map<std::vector<SiteIndex>, std::size_t> next;
    for (const auto& [partial, orbit] : current) {
      const std::vector<Vec3> positions = positions_of(partial, lattice);
      for (const SiteIndex& q : expand(partial, positions, step, lattice, config, shells)) {
        std::vector<SiteIndex> grown = partial;
        grown.push_back(q);
        std::size_t grown_orbit = 1;
        std::vector<SiteIndex> key = canonical(grown, &grown_orbit);
        next.emplace(std::move(key), grown_orbit);
        if (next.size() > config.max_branches) {
          fail(ErrorKind::Capacity, fmt::format("placement step {} ('{}') exceeds the branch cap of {}", s + 1,
                                                step.label, config.max_branches));
        }
      }
    }
    if (next.empty()) {
      fail(ErrorKind::Infeasible,
           fmt::format("no lattice site for '{}' is consistent with its measured couplings (step {}, {} partial "
                       "solutions before it)",
                       step.label, s + 1, current.size()));
    }
    current = std::move(next);
    std::size_t raw = 0;
    for (const auto& [partial, orbit] : current) raw += orbit;
    result.branch_history.push_back(current.size());
    result.branch_history_raw.push_back(raw);
  }

  std::map<std::string, std::vector<LatticeSite>> seen;
  for (const auto& [sites, orbit] : current) {
    PlacementSolution sol;
    for (std::size_t k = 0; k < sites.size(); ++k) sol.assignment[result.order[k]] = lattice.site(sites[k]);
    sol.residual = placement_residual(sol.assignment, measurements, config);
    sol.branch_history = result.branch_history;
    sol.multiplicity = orbit;
    for (const auto& [label, site] : sol.assignment) {
      auto& list = seen[label];
      if (std::none_of(list.begin(), list.end(), [&](const LatticeSite& x) { return x.index == site.index; }))
        list.push_back(site);
    }
    result.solutions.push_back(std::move(sol));
  }
  for (auto& [label, sites] : seen) {
    if (sites.size() > 1) {
      std::sort(sites.begin(), sites.end(), [](const LatticeSite& a, const LatticeSite& b) { return a.index < b.index; });
      result.ambiguous.push_back({label, sites});
    }
  }
  return result;
}

bool assignments_equivalent(const Assignment& a, const Assignment& b, const Lattice& lattice) {
  if (a.size() != b.size()) return false;
  std::vector<SiteIndex> sa, sb;
  for (const auto& [label, site] : a) {
    const auto it = b.find(label);
    if (it == b.end()) return false;
    sa.push_back(site.index);
    sb.push_back(it->second.index);
  }
  const AnchorSymmetry symmetry(lattice);
  return symmetry.canonical(sa) == symmetry.canonical(sb);
}

}  // namespace spinloc
