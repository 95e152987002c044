#include "spinloc/rng.hpp"

#include <cmath>
#include <numbers>

#include "spinloc/error.hpp"

namespace spinloc {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

std::uint64_t Rng::below(std::uint64_t n) {
  require(n > 0, ErrorKind::InvalidArgument, "Rng::below needs n > 0");
  // Rejection keeps the result exactly uniform.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(2.0 * std::numbers::pi * u2);
  has_spare_ = true;
  return radius * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double rate) {
  require(rate > 0.0, ErrorKind::InvalidArgument, "exponential rate must be positive");
  return -std::log1p(-uniform()) / rate;
}

std::uint64_t Rng::poisson(double mean) {
  require(mean >= 0.0 && std::isfinite(mean), ErrorKind::InvalidArgument, "Poisson mean must be finite and >= 0");
  std::uint64_t total = 0;
  while (mean > 30.0) {
    total += poisson(30.0);
    mean -= 30.0;
  }
  const double limit = std::exp(-mean);
  double p = 1.0;
  std::uint64_t k = 0;
  while (true) {
    p *= uniform();
    if (p <= limit) break;
    ++k;
  }
  return total + k;
}

}  // namespace spinloc
