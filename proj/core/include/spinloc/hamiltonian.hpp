#pragma once

#include <array>
#include <complex>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "spinloc/spinphys.hpp"

namespace spinloc {

inline constexpr int kHilbertDim = 16;

using HamiltonianMatrix = Eigen::Matrix<std::complex<double>, kHilbertDim, kHilbertDim>;

struct NucleusSpec {
  SpinSpecies species;
  HyperfineTensor hyperfine;
};

/// Electron S = 3/2 plus two spin-1/2 nuclei. `coupling` is the full
/// nucleus-nucleus tensor in Hz (H_nn = I1 . C . I2).
struct SpinSystemSpec {
  double zero_field_splitting_hz = 35e6;
  FieldConfig field;
  std::array<NucleusSpec, 2> nuclei;
  Mat3 coupling = Mat3::Zero();

  void validate() const;
  DipolarTensor pair_coupling() const { return secular_view(coupling); }
};

/// Two-nucleus system with the internuclear tensor taken from geometry.
SpinSystemSpec make_spin_system(double zero_field_splitting_hz, const FieldConfig& field,
                                const NucleusSpec& first, const Vec3& pos_first,
                                const NucleusSpec& second, const Vec3& pos_second);

/// |m_s, m_I1, m_I2>. Basis order is m_s = 3/2 .. -3/2, then m_I1, then m_I2,
/// each nuclear projection +1/2 before -1/2.
struct EigenstateLabel {
  double m_s = 1.5;
  double m_i1 = 0.5;
  double m_i2 = 0.5;

  int basis_index() const;
  static EigenstateLabel from_index(int index);
};

HamiltonianMatrix build_hamiltonian(const SpinSystemSpec& spec);

/// Diagonal of the secular Hamiltonian for one product state.
double eigenenergy_zeroth(const SpinSystemSpec& spec, const EigenstateLabel& label);

/// Exact eigenvalues indexed by the product state each eigenvector overlaps
/// most. Throws Labeling when an overlap falls below `overlap_threshold` or
/// two eigenvectors claim the same product state.
struct LabeledSpectrum {
  std::array<double, kHilbertDim> energy{};
  double min_overlap = 1.0;
};

LabeledSpectrum diagonalize_labeled(const SpinSystemSpec& spec, double overlap_threshold = 0.6);

/// 1/2 |l(ms,+,+) + l(ms,-,-) - l(ms,-,+) - l(ms,+,-)| from any labeled spectrum.
double sedor_combination(const std::array<double, kHilbertDim>& energy, double m_s);

double sedor_frequency_exact(const SpinSystemSpec& spec, double m_s);

/// Perturbative shifts of the SEDOR combination l(++) + l(--) - l(+-) - l(-+)
/// for m_s = +-3/2, all in Hz.
///
///   dl1   = (3/2) (a1_zx a2_zx + a1_zy a2_zy) / (l0(m_s) - l0(m_s - sgn m_s))
///   dl2_0 = sum_j (aj_zx c_zx + aj_zy c_zy) / (gamma_j B_z)
///   dl2_1 = -(9/4) sum_j aj_zz (aj_zx c_zx + aj_zy c_zy) / (gamma_j B_z)^2
///   dl3_0 = 2 (B_x c_zx + B_y c_zy) / B_z
///   dl3_1 = -sum_j aj_zz (B_x c_zx + B_y c_zy) / (B_z gamma_j B_z)
///
/// The second-order shift is dl1 + m_s dl2_0 + dl2_1 + dl3_0 + m_s dl3_1.
/// `resummed` replaces the nuclear-tilt terms by the projection of C onto
/// the two nuclear quantization axes, n1 . C . n2 - C_zz, which keeps the
/// C_zz theta^2 pieces that the strict expansion drops; it is the estimate
/// used for frequencies.
struct SedorCorrection {
  double m_s = 1.5;
  double dl1 = 0.0;
  double dl2_0 = 0.0;
  double dl2_1 = 0.0;
  double dl3_0 = 0.0;
  double dl3_1 = 0.0;
  double second_order = 0.0;
  double resummed = 0.0;
  double c_zz = 0.0;

  /// Odd-in-m_s part, which cancels under +-3/2 averaging.
  double odd_part() const noexcept { return m_s * (dl2_0 + dl3_1); }
  double frequency_second_order() const noexcept;
  double frequency() const noexcept;
};

SedorCorrection sedor_correction_second_order(const SpinSystemSpec& spec, double m_s);

/// Mean of sedor_frequency_exact over m_s = +3/2 and -3/2.
double subspace_averaged_sedor(const SpinSystemSpec& spec);

struct SweepPoint {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double deviation_plus = 0.0;
  double deviation_minus = 0.0;
  double deviation_averaged = 0.0;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  double max_plus = 0.0;
  double max_minus = 0.0;
  double max_averaged = 0.0;
  double c_zz = 0.0;

  double max_single() const noexcept { return max_plus > max_minus ? max_plus : max_minus; }
};

/// Sweeps the transverse hyperfine azimuth of both nuclei over `phi_grid`
/// (radians), A_zx = cos(phi) A_perp and A_zy = sin(phi) A_perp, with a
/// transverse field of `transverse_field_gauss` along x. A nucleus with
/// A_perp = 0 is not swept. Deviations are signed f_exact - |C_zz|/2; the
/// maxima are of their absolute values.
SweepResult deviation_sweep(const SpinSystemSpec& spec_template, std::span<const double> phi_grid,
                            double transverse_field_gauss = 2.3);

std::vector<double> uniform_phi_grid(int n);

/// CSV columns pair,ms_mode,phi1_rad,phi2_rad,deviation_hz.
void write_sweep_csv(std::ostream& out, const std::string& pair, const SweepResult& result,
                     bool header = true);

}  // namespace spinloc
