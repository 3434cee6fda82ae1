#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace degenac {

/// A function sampled at the M+1 nodes x_i = a + i h of a uniform grid on
/// [a, b], h = (b - a) / M.
class Field {
 public:
  /// Throws InvalidArgument unless a < b, values.size() >= 3 and every value
  /// is finite.
  Field(double a, double b, std::vector<double> values);

  /// Samples f at the M+1 nodes.
  static Field sample(double a, double b, std::size_t cells, const std::function<double(double)>& f);

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  std::size_t cells() const noexcept { return values_.size() - 1; }
  std::size_t size() const noexcept { return values_.size(); }
  double step() const noexcept { return (b_ - a_) / static_cast<double>(cells()); }
  double x(std::size_t i) const noexcept {
    return i == cells() ? b_ : a_ + static_cast<double>(i) * step();
  }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }

  std::vector<double> nodes() const;

  /// Same grid, new values (not validated for finiteness).
  Field with_values(std::vector<double> values) const;

  /// Piecewise-linear interpolant at x (clamped to [a, b]).
  double interpolate(double x) const;

  bool same_grid(const Field& other) const noexcept;

 private:
  double a_;
  double b_;
  std::vector<double> values_;
};

/// sup_i |u_i - w_i|. Throws InvalidArgument on mismatched grids.
double max_abs_difference(const Field& u, const Field& w);

/// Composite-trapezoid integral of |u - g| over the grid.
double l1_distance(const Field& u, const std::function<double(double)>& g);

}  // namespace degenac
