#include "spinloc/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "spinloc/error.hpp"
#include "spinloc/units.hpp"

namespace spinloc {

namespace {

using cd = std::complex<double>;
using Op4 = Eigen::Matrix<cd, 4, 4>;
using Op2 = Eigen::Matrix<cd, 2, 2>;

struct SpinOps4 {
  Op4 x, y, z;
};
struct SpinOps2 {
  Op2 x, y, z;
};

SpinOps4 spin_three_halves() {
  // Basis m = 3/2, 1/2, -1/2, -3/2.
  Op4 plus = Op4::Zero();
  plus(0, 1) = std::sqrt(3.0);
  plus(1, 2) = 2.0;
  plus(2, 3) = std::sqrt(3.0);
  const Op4 minus = plus.adjoint();
  SpinOps4 s;
  s.x = 0.5 * (plus + minus);
  s.y = cd(0.0, -0.5) * (plus - minus);
  s.z = Op4::Zero();
  s.z.diagonal() << 1.5, 0.5, -0.5, -1.5;
  return s;
}

SpinOps2 spin_half() {
  SpinOps2 s;
  s.x << 0.0, 0.5, 0.5, 0.0;
  s.y << cd(0.0), cd(0.0, -0.5), cd(0.0, 0.5), cd(0.0);
  s.z << 0.5, 0.0, 0.0, -0.5;
  return s;
}

HamiltonianMatrix kron3(const Op4& e, const Op2& n1, const Op2& n2) {
  HamiltonianMatrix out;
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 2; ++c)
        for (int d = 0; d < 2; ++d)
          for (int f = 0; f < 2; ++f)
            for (int g = 0; g < 2; ++g)
              out(a * 4 + c * 2 + f, b * 4 + d * 2 + g) = e(a, b) * n1(c, d) * n2(f, g);
  return out;
}

double half_index(double m) { return m == 0.5 ? 0 : 1; }

void check_nuclear_projection(double m) {
  require(m == 0.5 || m == -0.5, ErrorKind::InvalidArgument, "nuclear projection must be +-1/2");
}

void check_outer_subspace(double m_s) {
  require(m_s == 1.5 || m_s == -1.5, ErrorKind::InvalidArgument,
          "perturbative SEDOR corrections are defined for m_s = +-3/2");
}

}  // namespace

void SpinSystemSpec::validate() const {
  field.validate();
  require(std::isfinite(zero_field_splitting_hz), ErrorKind::InvalidArgument, "D must be finite");
  for (const auto& n : nuclei) {
    require(std::isfinite(n.hyperfine.a_zz) && std::isfinite(n.hyperfine.a_zx) && std::isfinite(n.hyperfine.a_zy),
            ErrorKind::InvalidArgument, "hyperfine components must be finite");
    require(n.species.spin == 0.5, ErrorKind::InvalidArgument, "nuclei must be spin 1/2");
  }
  require(coupling.allFinite(), ErrorKind::InvalidArgument, "coupling tensor must be finite");
}

SpinSystemSpec make_spin_system(double zero_field_splitting_hz, const FieldConfig& field,
                                const NucleusSpec& first, const Vec3& pos_first,
                                const NucleusSpec& second, const Vec3& pos_second) {
  SpinSystemSpec spec;
  spec.zero_field_splitting_hz = zero_field_splitting_hz;
  spec.field = field;
  spec.nuclei = {first, second};
  spec.coupling = dipolar_tensor(pos_first, pos_second, first.species, second.species);
  spec.validate();
  return spec;
}

int EigenstateLabel::basis_index() const {
  check_electron_projection(m_s);
  check_nuclear_projection(m_i1);
  check_nuclear_projection(m_i2);
  const int s = static_cast<int>(1.5 - m_s);
  return s * 4 + static_cast<int>(half_index(m_i1)) * 2 + static_cast<int>(half_index(m_i2));
}

EigenstateLabel EigenstateLabel::from_index(int index) {
  require(index >= 0 && index < kHilbertDim, ErrorKind::InvalidArgument, "basis index out of range");
  return {1.5 - index / 4, (index / 2) % 2 == 0 ? 0.5 : -0.5, index % 2 == 0 ? 0.5 : -0.5};
}

HamiltonianMatrix build_hamiltonian(const SpinSystemSpec& spec) {
  spec.validate();
  static const SpinOps4 s = spin_three_halves();
  static const SpinOps2 i = spin_half();
  static const Op4 e4 = Op4::Identity();
  static const Op2 e2 = Op2::Identity();

  const FieldConfig& f = spec.field;
  const double gamma_e = ConstantsTable::electron_species(f.g_electron).gamma_hz_per_t;

  const std::array<HamiltonianMatrix, 3> se{kron3(s.x, e2, e2), kron3(s.y, e2, e2), kron3(s.z, e2, e2)};
  const std::array<HamiltonianMatrix, 3> i1{kron3(e4, i.x, e2), kron3(e4, i.y, e2), kron3(e4, i.z, e2)};
  const std::array<HamiltonianMatrix, 3> i2{kron3(e4, e2, i.x), kron3(e4, e2, i.y), kron3(e4, e2, i.z)};

  HamiltonianMatrix h = spec.zero_field_splitting_hz * se[2] * se[2];
  h += units::larmor(gamma_e, f.b_x) * se[0] + units::larmor(gamma_e, f.b_y) * se[1] +
       units::larmor(gamma_e, f.b_z) * se[2];

  for (int n = 0; n < 2; ++n) {
    const auto& nuc = spec.nuclei[static_cast<std::size_t>(n)];
    const auto& in = n == 0 ? i1 : i2;
    const double g = nuc.species.gamma_hz_per_t;
    h += units::larmor(g, f.b_x) * in[0] + units::larmor(g, f.b_y) * in[1] + units::larmor(g, f.b_z) * in[2];
    const HyperfineTensor& a = nuc.hyperfine;
    h += a.a_zz * se[2] * in[2];
    h += a.a_zx * (se[2] * in[0] + se[0] * in[2]);
    h += a.a_zy * (se[2] * in[1] + se[1] * in[2]);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (spec.coupling(a, b) != 0.0) h += spec.coupling(a, b) * i1[static_cast<std::size_t>(a)] * i2[static_cast<std::size_t>(b)];
  return h;
}

double eigenenergy_zeroth(const SpinSystemSpec& spec, const EigenstateLabel& label) {
  label.basis_index();
  const FieldConfig& f = spec.field;
  const double gamma_e = ConstantsTable::electron_species(f.g_electron).gamma_hz_per_t;
  const double ms = label.m_s;
  double e = ms * ms * spec.zero_field_splitting_hz + units::larmor(gamma_e, f.b_z) * ms;
  const std::array<double, 2> mi{label.m_i1, label.m_i2};
  for (std::size_t n = 0; n < 2; ++n) {
    const auto& nuc = spec.nuclei[n];
    e += (units::larmor(nuc.species.gamma_hz_per_t, f.b_z) + ms * nuc.hyperfine.a_zz) * mi[n];
  }
  return e + mi[0] * mi[1] * spec.coupling(2, 2);
}

LabeledSpectrum diagonalize_labeled(const SpinSystemSpec& spec, double overlap_threshold) {
  const HamiltonianMatrix h = build_hamiltonian(spec);
  LabeledSpectrum out;

  HamiltonianMatrix off = h;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() == 0.0) {
    for (int n = 0; n < kHilbertDim; ++n) out.energy[static_cast<std::size_t>(n)] = h(n, n).real();
    return out;
  }

  Eigen::SelfAdjointEigenSolver<HamiltonianMatrix> solver(h);
  require(solver.info() == Eigen::Success, ErrorKind::Internal, "eigensolver failed");
  const auto& vecs = solver.eigenvectors();
  std::array<bool, kHilbertDim> taken{};
  for (int k = 0; k < kHilbertDim; ++k) {
    int best = 0;
    double best_overlap = -1.0;
    for (int n = 0; n < kHilbertDim; ++n) {
      const double ov = std::norm(vecs(n, k));
      if (ov > best_overlap) {
        best_overlap = ov;
        best = n;
      }
    }
    if (best_overlap < overlap_threshold || taken[static_cast<std::size_t>(best)]) {
      const EigenstateLabel l = EigenstateLabel::from_index(best);
      fail(ErrorKind::Labeling, fmt::format("ambiguous eigenstate assignment near |{}, {}, {}> (overlap {:.3f})",
                                            l.m_s, l.m_i1, l.m_i2, best_overlap));
    }
    taken[static_cast<std::size_t>(best)] = true;
    out.energy[static_cast<std::size_t>(best)] = solver.eigenvalues()(k);
    out.min_overlap = std::min(out.min_overlap, best_overlap);
  }
  return out;
}

double sedor_combination(const std::array<double, kHilbertDim>& energy, double m_s) {
  check_electron_projection(m_s);
  const std::size_t base = static_cast<std::size_t>(1.5 - m_s) * 4;
  return 0.5 * std::abs(energy[base] + energy[base + 3] - energy[base + 1] - energy[base + 2]);
}

double sedor_frequency_exact(const SpinSystemSpec& spec, double m_s) {
  check_electron_projection(m_s);
  return sedor_combination(diagonalize_labeled(spec).energy, m_s);
}

double SedorCorrection::frequency_second_order() const noexcept { return 0.5 * std::abs(c_zz + second_order); }
double SedorCorrection::frequency() const noexcept { return 0.5 * std::abs(c_zz + resummed); }

SedorCorrection sedor_correction_second_order(const SpinSystemSpec& spec, double m_s) {
  spec.validate();
  check_outer_subspace(m_s);
  const FieldConfig& f = spec.field;
  require(f.b_z > 0.0, ErrorKind::InvalidArgument, "perturbative corrections need B_z > 0");
  const double gamma_e = ConstantsTable::electron_species(f.g_electron).gamma_hz_per_t;
  const Mat3& c = spec.coupling;
  const double c_zx = c(2, 0);
  const double c_zy = c(2, 1);

  SedorCorrection out;
  out.m_s = m_s;
  out.c_zz = c(2, 2);

  const HyperfineTensor& a1 = spec.nuclei[0].hyperfine;
  const HyperfineTensor& a2 = spec.nuclei[1].hyperfine;
  const double inner = m_s - std::copysign(1.0, m_s);
  const double den1 = spec.zero_field_splitting_hz * (m_s * m_s - inner * inner) +
                      units::larmor(gamma_e, f.b_z) * (m_s - inner);
  const double transverse_product = a1.a_zx * a2.a_zx + a1.a_zy * a2.a_zy;
  if (transverse_product != 0.0) {
    require(den1 != 0.0, ErrorKind::Singularity, "dl1: electron level crossing (D and B_z cancel)");
    out.dl1 = 1.5 * transverse_product / den1;
  }

  const double field_dot = f.b_x * c_zx + f.b_y * c_zy;
  out.dl3_0 = 2.0 * field_dot / f.b_z;
  for (std::size_t j = 0; j < 2; ++j) {
    const HyperfineTensor& a = spec.nuclei[j].hyperfine;
    const double larmor = units::larmor(spec.nuclei[j].species.gamma_hz_per_t, f.b_z);
    require(larmor != 0.0, ErrorKind::Singularity, "dl2/dl3: vanishing nuclear Larmor frequency");
    const double hf_dot = a.a_zx * c_zx + a.a_zy * c_zy;
    out.dl2_0 += hf_dot / larmor;
    out.dl2_1 += -2.25 * a.a_zz * hf_dot / (larmor * larmor);
    out.dl3_1 += -a.a_zz * field_dot / (f.b_z * larmor);
  }
  out.second_order = out.dl1 + m_s * out.dl2_0 + out.dl2_1 + out.dl3_0 + m_s * out.dl3_1;

  std::array<Vec3, 2> axis;
  for (std::size_t j = 0; j < 2; ++j) {
    const HyperfineTensor& a = spec.nuclei[j].hyperfine;
    const double g = spec.nuclei[j].species.gamma_hz_per_t;
    const Vec3 h(m_s * a.a_zx + units::larmor(g, f.b_x), m_s * a.a_zy + units::larmor(g, f.b_y),
                 units::larmor(g, f.b_z) + m_s * a.a_zz);
    require(h.z() != 0.0, ErrorKind::Singularity, "nuclear quantization axis lies in the plane");
    axis[j] = h.normalized() * std::copysign(1.0, h.z());
  }
  out.resummed = axis[0].dot(c * axis[1]) - c(2, 2) + out.dl1;
  return out;
}

double subspace_averaged_sedor(const SpinSystemSpec& spec) {
  const LabeledSpectrum spectrum = diagonalize_labeled(spec);
  return 0.5 * (sedor_combination(spectrum.energy, 1.5) + sedor_combination(spectrum.energy, -1.5));
}

std::vector<double> uniform_phi_grid(int n) {
  require(n >= 1, ErrorKind::InvalidArgument, "phi grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) grid[static_cast<std::size_t>(k)] = 2.0 * std::numbers::pi * k / n;
  return grid;
}

SweepResult deviation_sweep(const SpinSystemSpec& spec_template, std::span<const double> phi_grid,
                            double transverse_field_gauss) {
  require(!phi_grid.empty(), ErrorKind::InvalidArgument, "empty phi grid");
  SpinSystemSpec spec = spec_template;
  spec.field.b_x = transverse_field_gauss;
  spec.field.b_y = 0.0;
  const std::array<double, 2> perp{spec_template.nuclei[0].hyperfine.a_perp(),
                                   spec_template.nuclei[1].hyperfine.a_perp()};
  static const std::array<double, 1> kFixed{0.0};
  const std::span<const double> grid1 = perp[0] > 0.0 ? phi_grid : std::span<const double>(kFixed);
  const std::span<const double> grid2 = perp[1] > 0.0 ? phi_grid : std::span<const double>(kFixed);

  SweepResult out;
  out.c_zz = spec.coupling(2, 2);
  const double secular = sedor_frequency_from_coupling(out.c_zz);
  for (double p1 : grid1) {
    for (double p2 : grid2) {
      spec.nuclei[0].hyperfine.a_zx = perp[0] * std::cos(p1);
      spec.nuclei[0].hyperfine.a_zy = perp[0] * std::sin(p1);
      spec.nuclei[1].hyperfine.a_zx = perp[1] * std::cos(p2);
      spec.nuclei[1].hyperfine.a_zy = perp[1] * std::sin(p2);
      const LabeledSpectrum spectrum = diagonalize_labeled(spec);
      SweepPoint pt;
      pt.phi1 = p1;
      pt.phi2 = p2;
      const double fp = sedor_combination(spectrum.energy, 1.5);
      const double fm = sedor_combination(spectrum.energy, -1.5);
      pt.deviation_plus = fp - secular;
      pt.deviation_minus = fm - secular;
      pt.deviation_averaged = 0.5 * (fp + fm) - secular;
      out.max_plus = std::max(out.max_plus, std::abs(pt.deviation_plus));
      out.max_minus = std::max(out.max_minus, std::abs(pt.deviation_minus));
      out.max_averaged = std::max(out.max_averaged, std::abs(pt.deviation_averaged));
      out.points.push_back(pt);
    }
  }
  return out;
}

void write_sweep_csv(std::ostream& out, const std::string& pair, const SweepResult& result, bool header) {
  if (header) out << "pair,ms_mode,phi1_rad,phi2_rad,deviation_hz\n";
  for (const auto& p : result.points) {
    out << fmt::format("{},ms_plus_3_2,{:.6f},{:.6f},{:.6f}\n", pair, p.phi1, p.phi2, p.deviation_plus);
    out << fmt::format("{},ms_minus_3_2,{:.6f},{:.6f},{:.6f}\n", pair, p.phi1, p.phi2, p.deviation_minus);
    out << fmt::format("{},averaged,{:.6f},{:.6f},{:.6f}\n", pair, p.phi1, p.phi2, p.deviation_averaged);
  }
}

}  // namespace spinloc
