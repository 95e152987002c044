#include "spinloc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <tuple>

#include <Eigen/Dense>

#include "spinloc/error.hpp"

namespace spinloc {

namespace {

struct BasisAtom {
  double fx, fy, fz;
};

// Si layers A B C B; carbon rows are filled from the Si rows plus u*c.
constexpr std::array<BasisAtom, 4> kSiBasis{{
    {0.0, 0.0, 0.0},
    {1.0 / 3.0, 2.0 / 3.0, 0.25},
    {2.0 / 3.0, 1.0 / 3.0, 0.5},
    {1.0 / 3.0, 2.0 / 3.0, 0.75},
}};

BasisAtom basis_atom(int basis, double carbon_offset) {
  const BasisAtom& si = kSiBasis[static_cast<std::size_t>(basis % 4)];
  return basis < 4 ? si : BasisAtom{si.fx, si.fy, si.fz + carbon_offset};
}

const double kIdealCOverA = 4.0 * std::sqrt(2.0 / 3.0);

}  // namespace

std::string_view to_string(Sublattice s) noexcept {
  return s == Sublattice::Si ? "Si" : "C";
}

void LatticeParams::validate() const {
  require(std::isfinite(a) && std::isfinite(c) && a > 0.0 && c > 0.0, ErrorKind::InvalidArgument,
          "lattice constants must be positive and finite");
  const double ratio = (c / a) / kIdealCOverA;
  require(std::abs(ratio - 1.0) <= 0.05, ErrorKind::InvalidArgument,
          "c/a = " + std::to_string(c / a) + " is more than 5% away from the ideal 4H ratio");
  require(carbon_offset > 0.0 && carbon_offset < 0.25, ErrorKind::InvalidArgument,
          "carbon offset must lie in (0, 1/4)");
}

std::size_t SiteIndexHash::operator()(const SiteIndex& s) const noexcept {
  std::size_t h = std::hash<int>{}(s.i);
  auto mix = [&h](int v) { h ^= std::hash<int>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); };
  mix(s.j);
  mix(s.k);
  mix(s.basis);
  return h;
}

Lattice::Lattice(const LatticeParams& params) : params_(params) {
  params_.validate();
  cell_[0] = Vec3(params_.a, 0.0, 0.0);
  cell_[1] = Vec3(-0.5 * params_.a, 0.5 * std::sqrt(3.0) * params_.a, 0.0);
  cell_[2] = Vec3(0.0, 0.0, params_.c);
  if (params_.k_site == KSiteVariant::Lower) {
    vacancy_ = {0, 0, 0, 1};
    si1_ = {0, 0, 0, 3};
  } else {
    vacancy_ = {0, 0, 0, 3};
    si1_ = {0, 0, 1, 1};
  }
}

Sublattice Lattice::species_of_basis(int basis) {
  return basis < 4 ? Sublattice::Si : Sublattice::C;
}

Vec3 Lattice::cell_vector(int axis) const { return cell_.at(static_cast<std::size_t>(axis)); }

Vec3 Lattice::fractional_to_cartesian(double fx, double fy, double fz) const {
  return fx * cell_[0] + fy * cell_[1] + fz * cell_[2];
}

Vec3 Lattice::position(const SiteIndex& s) const {
  require(s.basis >= 0 && s.basis < kBasisSize, ErrorKind::InvalidArgument, "basis index out of range");
  const BasisAtom b = basis_atom(s.basis, params_.carbon_offset);
  const BasisAtom v = basis_atom(vacancy_.basis, params_.carbon_offset);
  return fractional_to_cartesian((s.i - vacancy_.i) + (b.fx - v.fx),
                                 (s.j - vacancy_.j) + (b.fy - v.fy),
                                 (s.k - vacancy_.k) + (b.fz - v.fz));
}

LatticeSite Lattice::site(const SiteIndex& s) const {
  return {species_of_basis(s.basis), s, position(s)};
}

std::optional<SiteIndex> Lattice::locate(const Vec3& p, double tolerance) const {
  Eigen::Matrix3d m;
  m << cell_[0], cell_[1], cell_[2];
  const Vec3 frac = m.inverse() * p;
  const BasisAtom v = basis_atom(vacancy_.basis, params_.carbon_offset);
  for (int basis = 0; basis < kBasisSize; ++basis) {
    const BasisAtom b = basis_atom(basis, params_.carbon_offset);
    const SiteIndex candidate{
        static_cast<int>(std::lround(frac.x() - (b.fx - v.fx))) + vacancy_.i,
        static_cast<int>(std::lround(frac.y() - (b.fy - v.fy))) + vacancy_.j,
        static_cast<int>(std::lround(frac.z() - (b.fz - v.fz))) + vacancy_.k,
        basis};
    if ((position(candidate) - p).norm() <= tolerance) return candidate;
  }
  return std::nullopt;
}

std::vector<ShellEntry> Lattice::shell(int from_basis, Sublattice species, double radius) const {
  require(radius > 0.0, ErrorKind::InvalidArgument, "shell radius must be positive");
  const int n = static_cast<int>(std::ceil(radius / (params_.a * std::sqrt(3.0) / 2.0))) + 2;
  const int m = static_cast<int>(std::ceil(radius / params_.c)) + 2;
  const int first = species == Sublattice::Si ? 0 : 4;
  const BasisAtom from = basis_atom(from_basis, params_.carbon_offset);

  std::vector<ShellEntry> out;
  for (int di = -n; di <= n; ++di) {
    for (int dj = -n; dj <= n; ++dj) {
      for (int dk = -m; dk <= m; ++dk) {
        for (int basis = first; basis < first + 4; ++basis) {
          const BasisAtom to = basis_atom(basis, params_.carbon_offset);
          const Vec3 d = fractional_to_cartesian(di + (to.fx - from.fx), dj + (to.fy - from.fy),
                                                 dk + (to.fz - from.fz));
          const double r = d.norm();
          if (r > 1e-9 && r <= radius) out.push_back({di, dj, dk, basis, r});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ShellEntry& x, const ShellEntry& y) {
    const auto kx = std::llround(x.distance * 1e6);
    const auto ky = std::llround(y.distance * 1e6);
    return std::tie(kx, x.di, x.dj, x.dk, x.basis) < std::tie(ky, y.di, y.dj, y.dk, y.basis);
  });
  return out;
}

std::vector<LatticeSite> build_lattice(const LatticeParams& params, double radius, std::size_t max_sites) {
  require(radius > 0.0 && std::isfinite(radius), ErrorKind::InvalidArgument, "radius must be positive");
  const Lattice lattice(params);

  // 8 atoms per cell of volume (sqrt(3)/2) a^2 c.
  const double cell_volume = 0.5 * std::sqrt(3.0) * params.a * params.a * params.c;
  const double expected = 8.0 * (4.0 / 3.0) * std::numbers::pi * radius * radius * radius / cell_volume;
  require(expected <= 1.2 * static_cast<double>(max_sites) + 64.0, ErrorKind::Capacity,
          "radius " + std::to_string(radius) + " A would generate ~" + std::to_string(static_cast<long long>(expected)) +
              " sites, above the cap of " + std::to_string(max_sites));

  const int n = static_cast<int>(std::ceil(radius / (params.a * std::sqrt(3.0) / 2.0))) + 2;
  const int m = static_cast<int>(std::ceil(radius / params.c)) + 2;
  const SiteIndex vac = lattice.vacancy();

  std::vector<LatticeSite> sites;
  for (int i = vac.i - n; i <= vac.i + n; ++i) {
    for (int j = vac.j - n; j <= vac.j + n; ++j) {
      for (int k = vac.k - m; k <= vac.k + m; ++k) {
        for (int basis = 0; basis < kBasisSize; ++basis) {
          const SiteIndex idx{i, j, k, basis};
          if (lattice.is_vacancy(idx)) continue;
          const Vec3 p = lattice.position(idx);
          if (p.norm() > radius) continue;
          sites.push_back({Lattice::species_of_basis(basis), idx, p});
          require(sites.size() <= max_sites, ErrorKind::Capacity,
                  "lattice site count exceeds the cap of " + std::to_string(max_sites));
        }
      }
    }
  }
  std::sort(sites.begin(), sites.end(), [](const LatticeSite& x, const LatticeSite& y) {
    const auto kx = std::llround(x.position.norm() * 1e6);
    const auto ky = std::llround(y.position.norm() * 1e6);
    return std::tie(kx, x.index) < std::tie(ky, y.index);
  });
  return sites;
}

double nearest_neighbor_distance(const LatticeParams& params, Sublattice species) {
  const Lattice lattice(params);
  const int first = species == Sublattice::Si ? 0 : 4;
  double best = std::numeric_limits<double>::infinity();
  for (int basis = first; basis < first + 4; ++basis) {
    const auto shell = lattice.shell(basis, species, 1.5 * std::max(params.a, params.c / 2.0));
    if (!shell.empty()) best = std::min(best, shell.front().distance);
  }
  return best;
}

LatticeSite reference_site_si1(const LatticeParams& params) {
  const Lattice lattice(params);
  return lattice.site(lattice.si1());
}

}  // namespace spinloc
