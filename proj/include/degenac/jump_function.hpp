#pragma once

#include <vector>

namespace degenac {

/// v : [a, b] -> {-1, +1} with jumps at a < h_1 < ... < h_N < b, taking
/// first_value on (a, h_1) and alternating across each jump.
class PiecewiseConstant {
 public:
  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  const std::vector<double>& jumps() const noexcept { return jumps_; }
  int first_value() const noexcept { return first_value_; }
  std::size_t jump_count() const noexcept { return jumps_.size(); }

  /// Value on the open interval to the left of jump i (0-based); i = N gives
  /// the value after the last jump.
  int value_before(std::size_t i) const noexcept {
    return (i % 2 == 0) ? first_value_ : -first_value_;
  }
  int last_value() const noexcept { return value_before(jumps_.size()); }

  /// v(x); at a jump location the right-hand value is returned.
  double operator()(double x) const;

  friend PiecewiseConstant make_jump_function(double a, double b, std::vector<double> jumps,
                                              int first_value);

 private:
  PiecewiseConstant(double a, double b, std::vector<double> jumps, int first_value)
      : a_(a), b_(b), jumps_(std::move(jumps)), first_value_(first_value) {}

  double a_;
  double b_;
  std::vector<double> jumps_;
  int first_value_;
};

/// Throws InvalidArgument for a >= b, first_value not +-1, non-increasing
/// jumps, or jumps outside the open interval (a, b).
PiecewiseConstant make_jump_function(double a, double b, std::vector<double> jumps, int first_value);

/// Supremum of r with h_i + r < h_{i+1} - r, a <= h_1 - r, h_N + r <= b:
/// min(h_1 - a, b - h_N, min gap / 2). Returns b - a when there are no jumps.
double max_r(const PiecewiseConstant& v);

}  // namespace degenac
