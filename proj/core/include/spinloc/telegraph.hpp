#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace spinloc {

/// Photon count rate (counts/s) on a uniform time grid (s).
struct TimeTrace {
  std::vector<double> t;
  std::vector<double> counts;

  void validate() const;
  double dt() const;
};

/// 1 = bright, 0 = dark.
using StateSequence = std::vector<std::uint8_t>;

/// Centered running average over `window` bins (odd, shrunk at the edges),
/// then bright where the average exceeds `threshold`.
StateSequence smooth_and_threshold(const TimeTrace& trace, int window = 5, double threshold = 1295.0);

struct DwellTimes {
  std::vector<double> bright;
  std::vector<double> dark;
};

/// Run lengths times dt. The first and last runs are censored and dropped
/// unless `include_censored`. Throws InsufficientStatistics when either
/// state has fewer than 3 runs.
DwellTimes dwell_times(const StateSequence& states, double dt, bool include_censored = false);

enum class RateFitMode { MaximumLikelihood, Histogram };

struct RateEstimate {
  double rate = 0.0;
  double uncertainty = 0.0;
  std::size_t samples = 0;
};

/// Exponential rate from dwell times. MaximumLikelihood: 1/mean with
/// standard error rate/sqrt(N). Histogram: least-squares exponential fit
/// to a Freedman-Diaconis histogram.
RateEstimate fit_rates(const std::vector<double>& dwells, RateFitMode mode = RateFitMode::MaximumLikelihood);

struct TelegraphResult {
  RateEstimate bright_to_dark;
  RateEstimate dark_to_bright;
  DwellTimes dwells;
  double threshold = 0.0;
  int window = 0;
};

TelegraphResult analyze_telegraph(const TimeTrace& trace, int window = 5, double threshold = 1295.0,
                                  RateFitMode mode = RateFitMode::MaximumLikelihood, bool include_censored = false);

/// Number of state changes in a sequence.
std::size_t count_switches(const StateSequence& states);

}  // namespace spinloc
