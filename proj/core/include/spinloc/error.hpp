#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spinloc {

enum class ErrorKind {
  InvalidArgument,
  Domain,
  Capacity,
  Infeasible,
  Connectivity,
  Labeling,
  Singularity,
  Inversion,
  Fit,
  InsufficientStatistics,
  Convergence,
  Boundary,
  Format,
  Internal,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Domain failure raised by every spinloc module. The kind is machine-readable
/// and is what the CLI reports in its JSON error object.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

inline void require(bool condition, ErrorKind kind, const std::string& message) {
  if (!condition) fail(kind, message);
}

}  // namespace spinloc
