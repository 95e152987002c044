#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spinloc/spinphys.hpp"

namespace spinloc {

/// Measured nuclear transition frequencies of one spin in two electron
/// subspaces.
struct SpinFrequencies {
  std::string label;
  double f_a = 0.0;
  double f_b = 0.0;
  double m_s_a = 1.5;
  double m_s_b = -1.5;
};

enum class ScanMetric {
  /// (A_perp^2(dB) - A_perp,dft^2)^2, with A_perp^2 allowed to go negative.
  Perp,
  /// (A_perp(dB) - A_perp,dft)^2 + (A_zz(dB) - A_zz,dft)^2, A_perp signed.
  Joint,
};

struct FieldScanConfig {
  double half_width = 5.0;  // G
  double step = 0.01;       // G
  ScanMetric metric = ScanMetric::Perp;
};

struct FieldScanResult {
  double delta_b = 0.0;   // G, parabolic refinement of the grid minimum
  double a_zz = 0.0;      // Hz at delta_b
  double a_perp = 0.0;    // Hz at delta_b, signed continuation through zero
  double objective = 0.0;
  double curvature = 0.0;  // second difference of the objective at the grid minimum
  std::vector<std::pair<double, double>> trace;  // (delta_b, objective)
};

/// Re-inverts the frequencies on a grid of field corrections and returns the
/// one that brings A_perp closest to the DFT value. Throws Boundary when the
/// minimum sits on the grid edge.
FieldScanResult field_scan_min_aperp(const SpinFrequencies& freqs, const HyperfineTensor& dft,
                                     const FieldConfig& field, const SpinSpecies& species,
                                     const FieldScanConfig& config = {});

struct CalibrationResult {
  double delta_b = 0.0;
  double delta_b_uncertainty = 0.0;
  double relative_shift = 0.0;
  double g_factor = 0.0;
  double g_uncertainty = 0.0;
  std::map<std::string, double> per_spin_delta_b;
};

/// g = g0 (1 + dB / B), sigma_g = |g0| sigma_dB / B.
CalibrationResult g_factor_from_delta_b(double delta_b, double delta_b_uncertainty, double field_gauss,
                                        double g_baseline);

struct BathShift {
  double center_hz = 0.0;
  double width_hz = 0.0;
  double amplitude = 0.0;
  double offset = 0.0;
  double delta_f_hz = 0.0;
  double delta_b_gauss = 0.0;
  double snr = 0.0;
};

/// Gaussian-plus-offset fit of a bath spectrum; the shift is relative to
/// |gamma B| and converted to gauss through the species gamma.
BathShift bath_center_shift(const std::vector<std::pair<double, double>>& spectrum, const SpinSpecies& species,
                            double field_gauss);

struct DftDeviation {
  std::string label;
  double a_zz_relative = 0.0;
  double a_perp_relative = 0.0;
  bool a_zz_sign_mismatch = false;
};

struct DftComparison {
  std::vector<DftDeviation> rows;
  std::vector<std::string> missing_in_dft;
  std::vector<std::string> missing_in_experiment;
  int a_zz_within_10 = 0;
  int a_zz_over_30 = 0;
  int a_perp_within_10 = 0;
  int a_perp_over_30 = 0;
  int sign_mismatches = 0;
};

/// Relative deviations |exp - dft| / |dft| of A_zz and A_perp per spin.
DftComparison dft_comparison_report(const std::map<std::string, HyperfineTensor>& experimental,
                                    const std::map<std::string, HyperfineTensor>& dft);

}  // namespace spinloc
