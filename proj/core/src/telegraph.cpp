#include "spinloc/telegraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "spinloc/error.hpp"
#include "spinloc/least_squares.hpp"

namespace spinloc {

void TimeTrace::validate() const {
  require(t.size() == counts.size(), ErrorKind::Format, "trace: time and count columns differ in length");
  require(t.size() >= 2, ErrorKind::Format, "trace needs at least two samples");
  const double step = t[1] - t[0];
  require(step > 0.0, ErrorKind::Format, "trace timestamps must increase");
  for (std::size_t k = 1; k < t.size(); ++k) {
    require(std::abs((t[k] - t[k - 1]) - step) <= 1e-9, ErrorKind::Format,
            fmt::format("trace grid is not uniform at sample {}", k));
  }
  for (double c : counts) require(std::isfinite(c) && c >= 0.0, ErrorKind::Format, "trace counts must be >= 0");
}

double TimeTrace::dt() const {
  require(t.size() >= 2, ErrorKind::Format, "trace needs at least two samples");
  return (t.back() - t.front()) / static_cast<double>(t.size() - 1);
}

StateSequence smooth_and_threshold(const TimeTrace& trace, int window, double threshold) {
  trace.validate();
  require(window >= 1 && window % 2 == 1, ErrorKind::InvalidArgument, "smoothing window must be odd and >= 1");
  const auto n = static_cast<std::ptrdiff_t>(trace.counts.size());
  require(window <= n, ErrorKind::InvalidArgument,
          fmt::format("smoothing window {} exceeds the trace length {}", window, n));
  std::vector<double> prefix(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::ptrdiff_t k = 0; k < n; ++k) prefix[static_cast<std::size_t>(k) + 1] = prefix[static_cast<std::size_t>(k)] + trace.counts[static_cast<std::size_t>(k)];
  const std::ptrdiff_t half = window / 2;
  StateSequence out(static_cast<std::size_t>(n));
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, k - half);
    const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n, k + half + 1);
    const double mean = (prefix[static_cast<std::size_t>(hi)] - prefix[static_cast<std::size_t>(lo)]) / static_cast<double>(hi - lo);
    out[static_cast<std::size_t>(k)] = mean > threshold ? 1 : 0;
  }
  return out;
}

std::size_t count_switches(const StateSequence& states) {
  std::size_t n = 0;
  for (std::size_t k = 1; k < states.size(); ++k) n += states[k] != states[k - 1];
  return n;
}

DwellTimes dwell_times(const StateSequence& states, double dt, bool include_censored) {
  require(!states.empty(), ErrorKind::InvalidArgument, "empty state sequence");
  require(dt > 0.0, ErrorKind::InvalidArgument, "dt must be positive");
  struct Run {
    std::uint8_t state;
    std::size_t length;
  };
  std::vector<Run> runs;
  for (std::uint8_t s : states) {
    if (runs.empty() || runs.back().state != s) runs.push_back({s, 0});
    ++runs.back().length;
  }
  DwellTimes out;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    if (!include_censored && (k == 0 || k + 1 == runs.size())) continue;
    (runs[k].state ? out.bright : out.dark).push_back(static_cast<double>(runs[k].length) * dt);
  }
  require(out.bright.size() >= 3 && out.dark.size() >= 3, ErrorKind::InsufficientStatistics,
          fmt::format("need at least 3 complete dwells per state, got {} bright and {} dark", out.bright.size(),
                      out.dark.size()));
  return out;
}

namespace {

RateEstimate fit_histogram(const std::vector<double>& dwells) {
  std::vector<double> sorted = dwells;
  std::sort(sorted.begin(), sorted.end());
  const auto n = sorted.size();
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
  };
  const double iqr = quantile(0.75) - quantile(0.25);
  require(iqr > 0.0, ErrorKind::Fit, "histogram fit: dwell times have zero spread");
  const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
  const auto bins = static_cast<std::size_t>(std::ceil(sorted.back() / width));
  require(bins >= 3, ErrorKind::Fit, "histogram fit: fewer than 3 bins");
  std::vector<double> hist(bins, 0.0);
  for (double d : sorted) hist[std::min(bins - 1, static_cast<std::size_t>(d / width))] += 1.0;

  const double mean = std::accumulate(sorted.begin(), sorted.end(), 0.0) / static_cast<double>(n);
  // Model counts_k = N width lambda exp(-lambda t_k) at bin centers.
  const ResidualFunction model = [&](const Eigen::VectorXd& x, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
    r.resize(static_cast<Eigen::Index>(bins));
    if (jac) jac->resize(static_cast<Eigen::Index>(bins), 2);
    for (std::size_t k = 0; k < bins; ++k) {
      const double tc = (static_cast<double>(k) + 0.5) * width;
      const double e = std::exp(-x(1) * tc);
      const double w = 1.0 / std::sqrt(std::max(hist[k], 1.0));
      const auto row = static_cast<Eigen::Index>(k);
      r(row) = w * (x(0) * e - hist[k]);
      if (jac) {
        (*jac)(row, 0) = w * e;
        (*jac)(row, 1) = -w * x(0) * tc * e;
      }
    }
  };
  Eigen::VectorXd x0(2);
  x0 << static_cast<double>(n) * width / mean, 1.0 / mean;
  const LevenbergMarquardtResult fit = levenberg_marquardt(model, x0);
  require(fit.converged && fit.x(1) > 0.0, ErrorKind::Fit, "histogram exponential fit failed");
  const Eigen::Matrix2d jtj = fit.jacobian.transpose() * fit.jacobian;
  const double dof = std::max<double>(1.0, static_cast<double>(bins) - 2.0);
  const double var = (fit.cost / dof) * jtj.inverse()(1, 1);
  return {fit.x(1), std::sqrt(std::max(var, 0.0)), n};
}

}  // namespace

RateEstimate fit_rates(const std::vector<double>& dwells, RateFitMode mode) {
  require(dwells.size() >= 3, ErrorKind::InsufficientStatistics,
          fmt::format("rate fit needs at least 3 dwells, got {}", dwells.size()));
  for (double d : dwells) require(std::isfinite(d) && d > 0.0, ErrorKind::InvalidArgument, "dwell times must be positive");
  if (mode == RateFitMode::Histogram) return fit_histogram(dwells);
  const double mean = std::accumulate(dwells.begin(), dwells.end(), 0.0) / static_cast<double>(dwells.size());
  const double rate = 1.0 / mean;
  return {rate, rate / std::sqrt(static_cast<double>(dwells.size())), dwells.size()};
}

TelegraphResult analyze_telegraph(const TimeTrace& trace, int window, double threshold, RateFitMode mode,
                                  bool include_censored) {
  TelegraphResult out;
  out.window = window;
  out.threshold = threshold;
  out.dwells = dwell_times(smooth_and_threshold(trace, window, threshold), trace.dt(), include_censored);
  out.bright_to_dark = fit_rates(out.dwells.bright, mode);
  out.dark_to_bright = fit_rates(out.dwells.dark, mode);
  return out;
}

}  // namespace spinloc
