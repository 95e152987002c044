#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace spinloc {

using Vec3 = Eigen::Vector3d;

enum class Sublattice { Si, C };

std::string_view to_string(Sublattice s) noexcept;

/// Which of the two cubic (k) Si sites of the 4H cell hosts the vacancy.
/// `Lower` puts the vacancy on the B layer at z = c/4 and Si1 on the B layer
/// at z = 3c/4; `Upper` puts the vacancy at z = 3c/4 and Si1 one cell up.
enum class KSiteVariant { Lower, Upper };

/// 4H-SiC geometry. The basis is fixed (see kBasis in lattice.cpp):
///
///   index  species  fractional position            layer
///   0      Si       (0,   0,   0)                   A  (h)
///   1      Si       (1/3, 2/3, 1/4)                 B  (k)
///   2      Si       (2/3, 1/3, 1/2)                 C  (h)
///   3      Si       (1/3, 2/3, 3/4)                 B  (k)
///   4..7   C        Si position + (0, 0, u)
///
/// with hexagonal cell vectors a1 = a(1,0,0), a2 = a(-1/2, sqrt(3)/2, 0),
/// a3 = c(0,0,1) and u = 3/16 for ideal tetrahedra.
struct LatticeParams {
  double a = 3.073;   // angstrom
  double c = 10.053;  // angstrom
  double carbon_offset = 3.0 / 16.0;
  KSiteVariant k_site = KSiteVariant::Lower;

  /// Throws InvalidArgument on non-positive constants or c/a off the ideal
  /// 4H ratio 4*sqrt(2/3) by more than 5%.
  void validate() const;
  bool operator==(const LatticeParams&) const = default;
};

inline constexpr int kBasisSize = 8;

struct SiteIndex {
  int i = 0;
  int j = 0;
  int k = 0;
  int basis = 0;

  auto operator<=>(const SiteIndex&) const = default;
  bool operator==(const SiteIndex&) const = default;
};

struct SiteIndexHash {
  std::size_t operator()(const SiteIndex& s) const noexcept;
};

struct LatticeSite {
  Sublattice species = Sublattice::Si;
  SiteIndex index;
  Vec3 position = Vec3::Zero();
};

/// Same-cell offset to a site of a given species within some radius of a
/// reference basis atom. Adding (di, dj, dk) to the reference cell and using
/// `basis` addresses the neighbor.
struct ShellEntry {
  int di = 0;
  int dj = 0;
  int dk = 0;
  int basis = 0;
  double distance = 0.0;
};

/// Infinite 4H-SiC lattice with the vacancy at the origin. Positions are
/// computed from integer indices only, so a site's coordinates are
/// bit-reproducible from (cell, basis, params).
class Lattice {
 public:
  explicit Lattice(const LatticeParams& params = {});

  const LatticeParams& params() const noexcept { return params_; }

  Vec3 position(const SiteIndex& s) const;
  LatticeSite site(const SiteIndex& s) const;
  static Sublattice species_of_basis(int basis);

  SiteIndex vacancy() const noexcept { return vacancy_; }
  SiteIndex si1() const noexcept { return si1_; }
  bool is_vacancy(const SiteIndex& s) const noexcept { return s == vacancy_; }

  /// Lattice site at `p` (within `tolerance` angstrom), if any.
  std::optional<SiteIndex> locate(const Vec3& p, double tolerance = 1e-6) const;

  Vec3 cell_vector(int axis) const;

  /// All sites of `species` within `radius` of a site with basis `from_basis`,
  /// sorted by (distance, di, dj, dk, basis). Excludes the zero offset.
  std::vector<ShellEntry> shell(int from_basis, Sublattice species, double radius) const;

 private:
  Vec3 fractional_to_cartesian(double fx, double fy, double fz) const;

  LatticeParams params_;
  SiteIndex vacancy_;
  SiteIndex si1_;
  std::array<Vec3, 3> cell_;
};

/// All Si and C sites with |position| <= radius, vacancy excluded, ordered by
/// distance (rounded to 1e-6 angstrom) and then by index.
std::vector<LatticeSite> build_lattice(const LatticeParams& params, double radius,
                                       std::size_t max_sites = 4'000'000);

/// Minimum same-species separation.
double nearest_neighbor_distance(const LatticeParams& params, Sublattice species);

/// The on-axis Si at (0, 0, c/2).
LatticeSite reference_site_si1(const LatticeParams& params);

}  // namespace spinloc
