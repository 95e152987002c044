#include "spinloc/spinphys.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinloc/error.hpp"
#include "spinloc/units.hpp"

namespace spinloc {

double HyperfineTensor::a_perp() const noexcept { return std::hypot(a_zx, a_zy); }

void FieldConfig::validate() const {
  require(std::isfinite(b_z) && std::isfinite(b_x) && std::isfinite(b_y), ErrorKind::InvalidArgument,
          "field components must be finite");
  require(std::isfinite(g_electron), ErrorKind::InvalidArgument, "g-factor must be finite");
}

double dipolar_prefactor(const SpinSpecies& a, const SpinSpecies& b) {
  return units::kVacuumPermeability / units::kTwoPi / 2.0 * units::kPlanck * a.gamma_hz_per_t *
         b.gamma_hz_per_t * units::kCubicAngstromPerCubicMeter;
}

Mat3 dipolar_tensor(const Vec3& pos_i, const Vec3& pos_j, const SpinSpecies& species_i,
                    const SpinSpecies& species_j) {
  const Vec3 d = pos_j - pos_i;
  const double r = d.norm();
  require(r > 1e-9, ErrorKind::Domain, "dipolar coupling of coincident positions");
  const Vec3 n = d / r;
  const double scale = dipolar_prefactor(species_i, species_j) / (r * r * r);
  return scale * (3.0 * n * n.transpose() - Mat3::Identity());
}

double dipolar_coupling(const Vec3& pos_i, const Vec3& pos_j, const SpinSpecies& species_i,
                        const SpinSpecies& species_j) {
  const Vec3 d = pos_j - pos_i;
  const double r2 = d.squaredNorm();
  require(r2 > 1e-18, ErrorKind::Domain, "dipolar coupling of coincident positions");
  const double r = std::sqrt(r2);
  return dipolar_prefactor(species_i, species_j) / (r2 * r) * (3.0 * d.z() * d.z() / r2 - 1.0);
}

DipolarTensor secular_view(const Mat3& tensor) {
  return {tensor(2, 2), tensor(2, 0), tensor(2, 1)};
}

double sedor_frequency_from_coupling(double c_zz) { return 0.5 * std::abs(c_zz); }

void check_electron_projection(double m_s) {
  const double twice = 2.0 * m_s;
  const bool ok = twice == 1.0 || twice == -1.0 || twice == 3.0 || twice == -3.0;
  require(ok, ErrorKind::InvalidArgument, "m_s must be one of +-1/2, +-3/2, got " + std::to_string(m_s));
}

double nuclear_transition_frequency(const FieldConfig& field, const SpinSpecies& species,
                                    const HyperfineTensor& hf, double m_s) {
  check_electron_projection(m_s);
  const double par = units::larmor(species.gamma_hz_per_t, field.b_z) + m_s * hf.a_zz;
  return std::hypot(par, m_s * hf.a_perp());
}

double HyperfineSolution::signed_perp() const noexcept {
  return std::copysign(std::sqrt(std::abs(perp_squared)), perp_squared);
}

HyperfineSolution solve_hyperfine(double f_a, double f_b, const FieldConfig& field,
                                  const SpinSpecies& species, double m_s_a, double m_s_b) {
  check_electron_projection(m_s_a);
  check_electron_projection(m_s_b);
  require(m_s_a != m_s_b, ErrorKind::InvalidArgument, "hyperfine inversion needs two distinct subspaces");
  require(f_a > 0.0 && f_b > 0.0 && std::isfinite(f_a) && std::isfinite(f_b), ErrorKind::InvalidArgument,
          "transition frequencies must be positive");
  const double g = units::larmor(species.gamma_hz_per_t, field.b_z);
  require(g != 0.0, ErrorKind::Singularity, "zero nuclear Larmor frequency");

  // f_k^2 - g^2 = 2 g s_k A + s_k^2 (A^2 + P); linear in (A, A^2 + P).
  const double ag = std::abs(g);
  const double r_a = (f_a - ag) * (f_a + ag);
  const double r_b = (f_b - ag) * (f_b + ag);
  const double det = 2.0 * g * m_s_a * m_s_b * (m_s_b - m_s_a);
  HyperfineSolution out;
  out.a_zz = (r_a * m_s_b * m_s_b - r_b * m_s_a * m_s_a) / det;

  // Recover P from each equation directly, which avoids the A^2 cancellation.
  auto perp_from = [&](double f, double s) {
    const double lin = std::abs(g + s * out.a_zz);
    return (f - lin) * (f + lin) / (s * s);
  };
  const double w_a = m_s_a * m_s_a;
  const double w_b = m_s_b * m_s_b;
  out.perp_squared = (w_a * perp_from(f_a, m_s_a) + w_b * perp_from(f_b, m_s_b)) / (w_a + w_b);
  return out;
}

HyperfineTensor invert_hyperfine(double f_a, double f_b, const FieldConfig& field,
                                 const SpinSpecies& species, double m_s_a, double m_s_b) {
  const HyperfineSolution sol = solve_hyperfine(f_a, f_b, field, species, m_s_a, m_s_b);
  const double scale = std::max(f_a, f_b);
  const double floor = 1e-14 * scale * scale;
  if (sol.perp_squared < -floor) {
    fail(ErrorKind::Inversion, "no real A_perp for f = (" + std::to_string(f_a) + ", " + std::to_string(f_b) +
                                   ") Hz: A_perp^2 residual " + std::to_string(sol.perp_squared) + " Hz^2");
  }
  return {sol.a_zz, std::sqrt(std::max(sol.perp_squared, 0.0)), 0.0};
}

double nuclear_frequency_perturbative(const FieldConfig& field, const SpinSpecies& species,
                                      const HyperfineTensor& hf, double m_s, int order) {
  check_electron_projection(m_s);
  require(order == 0 || order == 2, ErrorKind::InvalidArgument, "perturbative order must be 0 or 2");
  const double f0 = units::larmor(species.gamma_hz_per_t, field.b_z) + m_s * hf.a_zz;
  if (order == 0) return f0;
  const double perp = hf.a_perp();
  if (perp == 0.0) return f0;
  require(f0 != 0.0, ErrorKind::Singularity, "second-order nuclear frequency: gamma B + m_s A_zz vanishes");
  return f0 + m_s * m_s * perp * perp / (2.0 * f0);
}

double transverse_field_from_misalignment(double field_gauss, double angle_rot_deg, double angle_tilt_deg) {
  require(field_gauss > 0.0, ErrorKind::InvalidArgument, "field must be positive");
  return std::hypot(field_gauss * std::sin(units::deg_to_rad(angle_rot_deg)),
                    field_gauss * std::sin(units::deg_to_rad(angle_tilt_deg)));
}

}  // namespace spinloc
