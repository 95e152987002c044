#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace spinloc {

/// Seeded generator with distribution transforms written out here, so a
/// seed gives the same stream with any standard library.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm = "mt19937_64; uniform=(x>>11)*2^-53; normal=Box-Muller; "
                                                  "poisson=Knuth (split above mean 30); exponential=-log(1-u)/rate";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n);
  double normal();
  double exponential(double rate);
  std::uint64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace spinloc
