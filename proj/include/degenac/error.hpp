#pragma once

#include <stdexcept>
#include <string>

namespace degenac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a documented precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed (non-convergence, blow-up, scheme failure).
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what, double best_estimate = 0.0)
      : Error(what), best_estimate_(best_estimate) {}

  /// Best available value at the time of failure, when one exists.
  double best_estimate() const noexcept { return best_estimate_; }

 private:
  double best_estimate_;
};

}  // namespace degenac
