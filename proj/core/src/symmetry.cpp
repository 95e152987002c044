#include "spinloc/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "spinloc/error.hpp"

namespace spinloc {

namespace {

Mat3 rotation_z(int sixths) {
  const double t = sixths * std::numbers::pi / 3.0;
  Mat3 r = Mat3::Identity();
  r(0, 0) = std::cos(t);
  r(0, 1) = -std::sin(t);
  r(1, 0) = std::sin(t);
  r(1, 1) = std::cos(t);
  return r;
}

bool preserves_lattice(const Lattice& lattice, const Mat3& m) {
  const double reach = 1.2 * lattice.params().c;
  for (const LatticeSite& s : build_lattice(lattice.params(), reach)) {
    const auto image = lattice.locate(m * s.position, 1e-6);
    if (!image || lattice.is_vacancy(*image) || Lattice::species_of_basis(image->basis) != s.species) return false;
  }
  return true;
}

}  // namespace

AnchorSymmetry::AnchorSymmetry(const Lattice& lattice) : lattice_(&lattice) {
  const Vec3 anchor = lattice.position(lattice.si1());
  Mat3 mirror_y = Mat3::Identity();
  mirror_y(1, 1) = -1.0;
  Mat3 flip_z = Mat3::Identity();
  flip_z(2, 2) = -1.0;

  for (int flip = 0; flip < 2; ++flip) {
    for (int mirror = 0; mirror < 2; ++mirror) {
      for (int k = 0; k < 6; ++k) {
        Mat3 m = rotation_z(k);
        if (mirror) m = m * mirror_y;
        if (flip) m = flip_z * m;
        if ((m * anchor - anchor).norm() > 1e-9) continue;
        if (!preserves_lattice(lattice, m)) continue;
        ops_.push_back({m, fmt::format("{}{}{}", flip ? "flipz*" : "", k == 0 ? "E" : fmt::format("C6^{}", k),
                                       mirror ? "*sigma_y" : "")});
      }
    }
  }
  require(!ops_.empty() && ops_.front().matrix.isIdentity(), ErrorKind::Internal, "symmetry detection lost the identity");
  cache_.resize(ops_.size());
}

SiteIndex AnchorSymmetry::apply(std::size_t op, const SiteIndex& site) const {
  if (op == 0) return site;
  auto& memo = cache_[op];
  if (auto it = memo.find(site); it != memo.end()) return it->second;
  const auto image = lattice_->locate(ops_[op].matrix * lattice_->position(site), 1e-6);
  require(image.has_value(), ErrorKind::Internal, "symmetry operation left the lattice");
  memo.emplace(site, *image);
  return *image;
}

std::vector<SiteIndex> AnchorSymmetry::canonical(const std::vector<SiteIndex>& sites, std::size_t* orbit_size) const {
  std::vector<std::vector<SiteIndex>> images;
  images.reserve(ops_.size());
  images.push_back(sites);
  for (std::size_t op = 1; op < ops_.size(); ++op) {
    std::vector<SiteIndex> img(sites.size());
    for (std::size_t k = 0; k < sites.size(); ++k) img[k] = apply(op, sites[k]);
    images.push_back(std::move(img));
  }
  std::sort(images.begin(), images.end());
  if (orbit_size) {
    *orbit_size = static_cast<std::size_t>(std::unique(images.begin(), images.end()) - images.begin());
  }
  return images.front();
}

}  // namespace spinloc
