#include "spinloc/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "spinloc/error.hpp"
#include "spinloc/least_squares.hpp"
#include "spinloc/units.hpp"

namespace spinloc {

FieldScanResult field_scan_min_aperp(const SpinFrequencies& freqs, const HyperfineTensor& dft,
                                     const FieldConfig& field, const SpinSpecies& species,
                                     const FieldScanConfig& config) {
  require(config.step > 0.0 && config.half_width > config.step, ErrorKind::InvalidArgument,
          "field scan needs step > 0 and half_width > step");
  const int n = static_cast<int>(std::llround(config.half_width / config.step));
  const double target = dft.a_perp() * dft.a_perp();

  auto evaluate = [&](double delta_b, HyperfineSolution* sol) {
    FieldConfig shifted = field;
    shifted.b_z = field.b_z + delta_b;
    const HyperfineSolution s = solve_hyperfine(freqs.f_a, freqs.f_b, shifted, species, freqs.m_s_a, freqs.m_s_b);
    if (sol) *sol = s;
    if (config.metric == ScanMetric::Joint) {
      const double dp = s.signed_perp() - dft.a_perp();
      const double dz = s.a_zz - dft.a_zz;
      return dp * dp + dz * dz;
    }
    return (s.perp_squared - target) * (s.perp_squared - target);
  };

  FieldScanResult out;
  int best = -n;
  double best_obj = std::numeric_limits<double>::infinity();
  for (int k = -n; k <= n; ++k) {
    const double db = k * config.step;
    const double obj = evaluate(db, nullptr);
    out.trace.emplace_back(db, obj);
    if (obj < best_obj) {
      best_obj = obj;
      best = k;
    }
  }
  if (best == -n || best == n) {
    fail(ErrorKind::Boundary, fmt::format("{}: mismatch minimum at the scan edge ({:+.2f} G); widen the grid",
                                          freqs.label, best * config.step));
  }
  const double y0 = out.trace[static_cast<std::size_t>(best + n - 1)].second;
  const double y1 = best_obj;
  const double y2 = out.trace[static_cast<std::size_t>(best + n + 1)].second;
  out.curvature = y0 - 2.0 * y1 + y2;
  double shift = 0.0;
  if (out.curvature > 0.0) shift = 0.5 * (y0 - y2) / out.curvature;
  out.delta_b = (best + std::clamp(shift, -0.5, 0.5)) * config.step;

  HyperfineSolution sol;
  out.objective = evaluate(out.delta_b, &sol);
  out.a_zz = sol.a_zz;
  out.a_perp = sol.signed_perp();
  return out;
}

CalibrationResult g_factor_from_delta_b(double delta_b, double delta_b_uncertainty, double field_gauss,
                                        double g_baseline) {
  require(field_gauss > 0.0, ErrorKind::InvalidArgument, "field must be positive");
  require(delta_b_uncertainty >= 0.0, ErrorKind::InvalidArgument, "uncertainty must be >= 0");
  CalibrationResult out;
  out.delta_b = delta_b;
  out.delta_b_uncertainty = delta_b_uncertainty;
  out.relative_shift = delta_b / field_gauss;
  out.g_factor = g_baseline * (1.0 + out.relative_shift);
  out.g_uncertainty = std::abs(g_baseline) * delta_b_uncertainty / field_gauss;
  return out;
}

BathShift bath_center_shift(const std::vector<std::pair<double, double>>& spectrum, const SpinSpecies& species,
                            double field_gauss) {
  require(spectrum.size() >= 5, ErrorKind::InvalidArgument, "bath spectrum needs at least 5 points");
  require(field_gauss > 0.0, ErrorKind::InvalidArgument, "field must be positive");

  std::vector<double> amps;
  for (const auto& [f, a] : spectrum) amps.push_back(a);
  std::vector<double> sorted = amps;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  const double base = sorted[sorted.size() / 2];

  // Moment initialization from the positive excess over the median.
  double w_sum = 0.0, m1 = 0.0, m2 = 0.0, peak = 0.0;
  for (const auto& [f, a] : spectrum) {
    const double w = std::max(a - base, 0.0);
    w_sum += w;
    m1 += w * f;
    peak = std::max(peak, a - base);
  }
  require(w_sum > 0.0 && peak > 0.0, ErrorKind::Fit, "bath spectrum has no peak above its median");
  m1 /= w_sum;
  for (const auto& [f, a] : spectrum) m2 += std::max(a - base, 0.0) * (f - m1) * (f - m1);
  const double sigma0 = std::sqrt(std::max(m2 / w_sum, 1e-300));

  const ResidualFunction model = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(spectrum.size()));
    if (jac) jac->resize(static_cast<Eigen::Index>(spectrum.size()), 4);
    for (std::size_t k = 0; k < spectrum.size(); ++k) {
      const double u = (spectrum[k].first - x(1)) / x(2);
      const double e = std::exp(-0.5 * u * u);
      const auto row = static_cast<Eigen::Index>(k);
      r(row) = x(0) * e + x(3) - spectrum[k].second;
      if (jac) {
        (*jac)(row, 0) = e;
        (*jac)(row, 1) = x(0) * e * u / x(2);
        (*jac)(row, 2) = x(0) * e * u * u / x(2);
        (*jac)(row, 3) = 1.0;
      }
    }
  };
  Eigen::VectorXd x0(4);
  x0 << peak, m1, sigma0, base;
  LevenbergMarquardtOptions opts;
  opts.max_iterations = 400;
  const LevenbergMarquardtResult fit = levenberg_marquardt(model, x0, opts);
  require(fit.converged, ErrorKind::Fit, "Gaussian bath fit did not converge");

  BathShift out;
  out.amplitude = fit.x(0);
  out.center_hz = fit.x(1);
  out.width_hz = std::abs(fit.x(2));
  out.offset = fit.x(3);
  const double noise = std::sqrt(fit.cost / static_cast<double>(spectrum.size()));
  out.snr = noise > 0.0 ? out.amplitude / noise : std::numeric_limits<double>::infinity();
  const auto [lo, hi] = std::minmax_element(spectrum.begin(), spectrum.end());
  require(out.amplitude > 0.0 && out.center_hz >= lo->first && out.center_hz <= hi->first, ErrorKind::Fit,
          "Gaussian bath fit wandered outside the spectrum");
  require(out.snr >= 3.0, ErrorKind::Fit, fmt::format("bath peak SNR {:.2f} is below 3", out.snr));

  const double per_gauss = std::abs(units::larmor(species.gamma_hz_per_t, 1.0));
  out.delta_f_hz = out.center_hz - per_gauss * field_gauss;
  out.delta_b_gauss = out.delta_f_hz / per_gauss;
  return out;
}

DftComparison dft_comparison_report(const std::map<std::string, HyperfineTensor>& experimental,
                                    const std::map<std::string, HyperfineTensor>& dft) {
  auto relative = [](double e, double d) {
    if (d == 0.0) return e == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::abs(e - d) / std::abs(d);
  };
  DftComparison out;
  for (const auto& [label, exp] : experimental) {
    auto it = dft.find(label);
    if (it == dft.end()) {
      out.missing_in_dft.push_back(label);
      continue;
    }
    DftDeviation row{label, relative(exp.a_zz, it->second.a_zz), relative(exp.a_perp(), it->second.a_perp()),
                     exp.a_zz * it->second.a_zz < 0.0};
    out.a_zz_within_10 += row.a_zz_relative <= 0.1 + 1e-12;
    out.a_zz_over_30 += row.a_zz_relative > 0.3;
    out.a_perp_within_10 += row.a_perp_relative <= 0.1 + 1e-12;
    out.a_perp_over_30 += row.a_perp_relative > 0.3;
    out.sign_mismatches += row.a_zz_sign_mismatch;
    out.rows.push_back(row);
  }
  for (const auto& [label, d] : dft)
    if (!experimental.contains(label)) out.missing_in_experiment.push_back(label);
  return out;
}

}  // namespace spinloc
