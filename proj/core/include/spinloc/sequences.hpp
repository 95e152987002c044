#pragma once

namespace spinloc {

// DDRF gate calculators. Frequencies are ordinary (Hz); the conversion to
// angular units happens inside each function.

/// Wraps an angle to (-pi, pi]. Idempotent.
double wrap_angle(double radians);

/// pi + 2 pi (f0 + f1 - 2 f_rf) tau, wrapped.
double ddrf_phase_update(double f0_hz, double f1_hz, double f_rf_hz, double tau_s);

/// wrap(delta - 2 pi (f0 + f1 - 2 f_rf) tau); zero on resonance.
double ddrf_resonance_condition(double delta_rad, double f0_hz, double f1_hz, double f_rf_hz, double tau_s);

/// sin(x) / x with the removable singularity filled in.
double sinc(double x);

/// Omega [sinc(2 pi (f1 - f_rf) tau) - sinc(2 pi (f0 - f_rf) tau)] in Hz.
double effective_rabi(double omega_hz, double f0_hz, double f1_hz, double f_rf_hz, double tau_s);

struct SequenceParams {
  double tau_s = 20e-6;
  int pulses = 16;
  double f_rf_hz = 0.0;
  double omega_hz = 0.0;
  double f0_hz = 0.0;
  double f1_hz = 0.0;

  void validate() const;
};

/// theta = 2 pi N Omega_eff tau. The gate rotates by +theta or -theta
/// depending on the initial electron state.
struct RotationAngle {
  double theta = 0.0;
  double omega_eff_hz = 0.0;

  double conditional(bool electron_flipped) const noexcept { return electron_flipped ? -theta : theta; }
};

RotationAngle rotation_angle(const SequenceParams& params);

/// Bare Rabi frequency whose rotation has magnitude |theta| for the other
/// parameters. Which electron branch gives +theta follows from the sign of
/// Omega_eff.
double solve_rabi_for_angle(double theta_rad, const SequenceParams& params);

}  // namespace spinloc
