#pragma once

#include <Eigen/Core>

#include "spinloc/constants.hpp"
#include "spinloc/lattice.hpp"

namespace spinloc {

using Mat3 = Eigen::Matrix3d;

/// Electron-nucleus hyperfine components seen by one nucleus (Hz).
struct HyperfineTensor {
  double a_zz = 0.0;
  double a_zx = 0.0;
  double a_zy = 0.0;

  double a_parallel() const noexcept { return a_zz; }
  double a_perp() const noexcept;

  bool operator==(const HyperfineTensor&) const = default;
};

/// Secular and pseudo-secular part of a nucleus-nucleus coupling (Hz).
struct DipolarTensor {
  double c_zz = 0.0;
  double c_zx = 0.0;
  double c_zy = 0.0;
};

/// Static field in gauss plus the electron g-factor used for the electron
/// Zeeman term.
struct FieldConfig {
  double b_z = 1960.9;
  double b_x = 0.0;
  double b_y = 0.0;
  double g_electron = -2.0028;

  void validate() const;
};

/// alpha_ij = (mu0 / 4 pi) h gamma_i gamma_j in Hz * A^3 for gammas in Hz/T.
double dipolar_prefactor(const SpinSpecies& a, const SpinSpecies& b);

/// C_zz = alpha / r^3 * (3 dz^2 / r^2 - 1), signed, in Hz.
double dipolar_coupling(const Vec3& pos_i, const Vec3& pos_j, const SpinSpecies& species_i,
                        const SpinSpecies& species_j);

/// Full point-dipole tensor C_ab = alpha / r^3 * (3 n_a n_b - delta_ab).
/// Its zz element equals dipolar_coupling.
Mat3 dipolar_tensor(const Vec3& pos_i, const Vec3& pos_j, const SpinSpecies& species_i,
                    const SpinSpecies& species_j);

DipolarTensor secular_view(const Mat3& tensor);

/// |C_zz| / 2.
double sedor_frequency_from_coupling(double c_zz);

/// Throws InvalidArgument unless m_s is one of +-1/2, +-3/2.
void check_electron_projection(double m_s);

/// sqrt((gamma B_z + m_s A_zz)^2 + (m_s A_perp)^2).
double nuclear_transition_frequency(const FieldConfig& field, const SpinSpecies& species,
                                    const HyperfineTensor& hf, double m_s);

/// A_zz and A_perp^2 from two transition frequencies. perp_squared may come
/// out negative for inconsistent input; invert_hyperfine rejects that case.
struct HyperfineSolution {
  double a_zz = 0.0;
  double perp_squared = 0.0;

  /// sign(P) * sqrt(|P|): continuous through P = 0.
  double signed_perp() const noexcept;
};

HyperfineSolution solve_hyperfine(double f_a, double f_b, const FieldConfig& field,
                                  const SpinSpecies& species, double m_s_a, double m_s_b);

/// Returns (A_zz, A_perp) packed as a_zz and a_zx; a_zy is zero since the
/// azimuth is not observable.
HyperfineTensor invert_hyperfine(double f_a, double f_b, const FieldConfig& field,
                                 const SpinSpecies& species, double m_s_a, double m_s_b);

/// Order 0: gamma B_z + m_s A_zz (signed). Order 2 adds m_s^2 A_perp^2 / (2 f0),
/// which carries the sign of f0 so |result| tracks the exact frequency.
double nuclear_frequency_perturbative(const FieldConfig& field, const SpinSpecies& species,
                                      const HyperfineTensor& hf, double m_s, int order);

/// sqrt((B sin rot)^2 + (B sin tilt)^2), angles in degrees.
double transverse_field_from_misalignment(double field_gauss, double angle_rot_deg,
                                          double angle_tilt_deg);

}  // namespace spinloc
