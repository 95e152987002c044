#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinloc/constants.hpp"
#include "spinloc/lattice.hpp"

namespace spinloc {

enum class SubspaceMode { PlusThreeHalves, MinusThreeHalves, Averaged };

std::string_view to_string(SubspaceMode mode) noexcept;
SubspaceMode subspace_mode_from_string(std::string_view text);

/// One SEDOR oscillation frequency between two labeled spins.
struct CouplingMeasurement {
  std::string spin_a;
  std::string spin_b;
  double f_hz = 0.0;
  double sigma_hz = 0.2;
  SubspaceMode mode = SubspaceMode::Averaged;

  void validate() const;
  bool operator==(const CouplingMeasurement&) const = default;
};

/// Unordered label pair, stored with first < second.
using PairKey = std::pair<std::string, std::string>;
PairKey make_pair_key(const std::string& a, const std::string& b);

/// "Si..." labels live on the Si sublattice, "C..." labels on the C one.
Sublattice species_of_label(std::string_view label);
SpinSpecies spin_species_of_label(std::string_view label, const ConstantsTable& constants);

struct PlacementConfig {
  double tolerance_default = 0.6;
  std::map<PairKey, double> tolerance_overrides;
  double relative_tolerance_strong = 0.05;
  double strong_threshold = 35.0;
  double min_detectable = 3.0;
  /// Empty means order_heuristic decides. Must start with the anchor.
  std::vector<std::string> placement_order;
  std::size_t max_branches = 1'000'000;
  std::string anchor_label = "Si1";
  /// Reject sites whose coupling to a placed spin with no detectable
  /// measurement would exceed 2 * min_detectable.
  bool weak_coupling_exclusion = false;
  /// Worst-case perturbative deviations from deviation_sweep, per pair.
  std::map<PairKey, double> deviation_bounds;
  /// Merge solutions related by the anchor symmetry group.
  bool reduce_symmetry = true;
  ConstantsTable constants;

  void validate() const;
};

/// Tolerances used for the measured strongly coupled Si1 pairs.
PlacementConfig strong_pair_placement_config();

/// Override if present, else the relative window above the strong
/// threshold, else the default; a larger sweep bound wins.
double tolerance_for_pair(const std::string& a, const std::string& b, double f_hz, const PlacementConfig& config,
                          std::optional<double> sweep_bound = std::nullopt);

using Assignment = std::map<std::string, LatticeSite>;

struct PlacementSolution {
  Assignment assignment;
  double residual = 0.0;
  std::vector<std::size_t> branch_history;
  /// Number of symmetry-related assignments this solution stands for.
  std::size_t multiplicity = 1;
};

struct AmbiguousSpin {
  std::string label;
  std::vector<LatticeSite> sites;
};

struct PlacementResult {
  std::vector<std::string> order;
  std::vector<PlacementSolution> solutions;
  /// Surviving partial solutions after each step, counted as symmetry
  /// classes and as individual assignments.
  std::vector<std::size_t> branch_history;
  std::vector<std::size_t> branch_history_raw;
  std::size_t symmetry_order = 1;
  std::vector<AmbiguousSpin> ambiguous;
  /// Measurements dropped as below min_detectable.
  std::size_t dropped_measurements = 0;
};

/// Sites for `new_label` consistent with every detectable measurement to a
/// placed spin. Occupied sites and the vacancy are excluded.
std::vector<LatticeSite> candidate_sites(const Assignment& placed, const std::string& new_label,
                                         const std::vector<CouplingMeasurement>& measurements,
                                         const Lattice& lattice, const PlacementConfig& config);

/// Breadth-first branch and prune over the placement order.
PlacementResult place_all(const std::vector<CouplingMeasurement>& measurements, const Lattice& lattice,
                          const PlacementConfig& config);

/// Greedy order from the anchor: most detectable couplings into the ordered
/// set first, then the larger maximum coupling, then the smaller label.
std::vector<std::string> order_heuristic(const std::vector<CouplingMeasurement>& measurements,
                                         const std::string& anchor = "Si1", double min_detectable = 3.0);

/// Sum of squared mismatches f - |C|/2 over detectable measurements whose
/// spins are both assigned.
double placement_residual(const Assignment& assignment, const std::vector<CouplingMeasurement>& measurements,
                          const PlacementConfig& config);

/// Same labels on sites related by one operation of the anchor symmetry
/// group.
bool assignments_equivalent(const Assignment& a, const Assignment& b, const Lattice& lattice);

}  // namespace spinloc
