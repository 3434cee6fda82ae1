#pragma once

#include <span>

namespace degenac {

/// Ordinary least squares y = slope * x + intercept.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  /// Coefficient of determination. 1 for a perfect fit; 0 when y is constant
  /// (nothing to explain) or x is degenerate.
  double r_squared = 0.0;
  /// Residual sum of squares.
  double sse = 0.0;
};

/// Throws InvalidArgument for fewer than 2 points or mismatched sizes.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace degenac
