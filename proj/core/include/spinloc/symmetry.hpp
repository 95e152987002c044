#pragma once

#include <string>
#include <unordered_map>
#include <vector>

#include "spinloc/lattice.hpp"
#include "spinloc/spinphys.hpp"

namespace spinloc {

/// Orthogonal map about the vacancy that sends the lattice onto itself.
struct PointOperation {
  Mat3 matrix = Mat3::Identity();
  std::string name;
};

/// Point operations that fix both the vacancy and the Si1 anchor and map
/// every site to a site of the same species. Pairwise dipolar couplings are
/// invariant under all of them, so placement solutions come in orbits of
/// this group. For 4H-SiC the group is C3v (order 6). The identity is
/// always element 0.
class AnchorSymmetry {
 public:
  explicit AnchorSymmetry(const Lattice& lattice);

  std::size_t order() const noexcept { return ops_.size(); }
  const std::vector<PointOperation>& operations() const noexcept { return ops_; }

  /// Image of a site under operation `op`. Memoized, so not thread-safe.
  SiteIndex apply(std::size_t op, const SiteIndex& site) const;

  /// Lexicographically smallest image of the sequence under the group,
  /// plus the number of distinct images (orbit size).
  std::vector<SiteIndex> canonical(const std::vector<SiteIndex>& sites, std::size_t* orbit_size = nullptr) const;

 private:
  const Lattice* lattice_;
  std::vector<PointOperation> ops_;
  mutable std::vector<std::unordered_map<SiteIndex, SiteIndex, SiteIndexHash>> cache_;
};

}  // namespace spinloc
