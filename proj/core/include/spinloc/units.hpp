#pragma once

// Unit conversion layer. Public quantities are Hz (ordinary frequency),
// gauss for fields, angstrom for lengths, seconds for time. Every factor that
// converts between those and SI or angular units lives here.

#include <numbers>

namespace spinloc::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double kTeslaPerGauss = 1e-4;
inline constexpr double kMetersPerAngstrom = 1e-10;
inline constexpr double kCubicAngstromPerCubicMeter = 1e30;

constexpr double gauss_to_tesla(double gauss) { return gauss * kTeslaPerGauss; }
constexpr double tesla_to_gauss(double tesla) { return tesla / kTeslaPerGauss; }

/// Hz -> rad/s.
constexpr double angular(double hz) { return kTwoPi * hz; }
/// rad/s -> Hz.
constexpr double ordinary(double rad_per_s) { return rad_per_s / kTwoPi; }

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// CODATA 2018.
inline constexpr double kPlanck = 6.62607015e-34;              // J s
inline constexpr double kVacuumPermeability = 1.25663706212e-6; // N A^-2
inline constexpr double kBohrMagnetonOverPlanck = 1.39962449361e10;  // Hz/T

/// Zeeman frequency gamma * B in Hz for gamma in Hz/T and B in gauss.
constexpr double larmor(double gamma_hz_per_t, double field_gauss) {
  return gamma_hz_per_t * gauss_to_tesla(field_gauss);
}

}  // namespace spinloc::units
