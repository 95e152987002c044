#include "spinloc/sequences.hpp"

#include <cmath>
#include <numbers>

#include "spinloc/error.hpp"
#include "spinloc/units.hpp"

namespace spinloc {

double wrap_angle(double radians) {
  constexpr double pi = std::numbers::pi;
  double w = std::remainder(radians, 2.0 * pi);
  if (w <= -pi) w += 2.0 * pi;
  return w;
}

double ddrf_phase_update(double f0_hz, double f1_hz, double f_rf_hz, double tau_s) {
  return wrap_angle(std::numbers::pi + units::angular(f0_hz + f1_hz - 2.0 * f_rf_hz) * tau_s);
}

double ddrf_resonance_condition(double delta_rad, double f0_hz, double f1_hz, double f_rf_hz, double tau_s) {
  return wrap_angle(delta_rad - units::angular(f0_hz + f1_hz - 2.0 * f_rf_hz) * tau_s);
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

double effective_rabi(double omega_hz, double f0_hz, double f1_hz, double f_rf_hz, double tau_s) {
  require(tau_s > 0.0, ErrorKind::InvalidArgument, "tau must be positive");
  return omega_hz * (sinc(units::angular(f1_hz - f_rf_hz) * tau_s) - sinc(units::angular(f0_hz - f_rf_hz) * tau_s));
}

void SequenceParams::validate() const {
  require(tau_s > 0.0, ErrorKind::InvalidArgument, "tau must be positive");
  require(pulses >= 0 && pulses % 2 == 0, ErrorKind::InvalidArgument, "pulse count must be even and >= 0");
  require(omega_hz >= 0.0, ErrorKind::InvalidArgument, "Rabi frequency must be >= 0");
}

RotationAngle rotation_angle(const SequenceParams& params) {
  params.validate();
  RotationAngle out;
  out.omega_eff_hz = effective_rabi(params.omega_hz, params.f0_hz, params.f1_hz, params.f_rf_hz, params.tau_s);
  out.theta = units::angular(out.omega_eff_hz) * params.pulses * params.tau_s;
  return out;
}

double solve_rabi_for_angle(double theta_rad, const SequenceParams& params) {
  SequenceParams unit = params;
  unit.omega_hz = 1.0;
  const double per_hz = rotation_angle(unit).theta;
  require(per_hz != 0.0, ErrorKind::Singularity, "the gate has no conditional rotation at these frequencies");
  return std::abs(theta_rad / per_hz);
}

}  // namespace spinloc
