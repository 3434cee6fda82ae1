#pragma once

#include <vector>

#include "degenac/field.hpp"

namespace degenac {

/// Closed probe set K: a finite union of closed intervals inside (-1, 1).
/// A degenerate interval [c, c] is the level {c}.
class ProbeSet {
 public:
  struct Interval {
    double lo;
    double hi;
  };

  /// K = {0}.
  ProbeSet() : intervals_{{0.0, 0.0}} {}

  /// Throws InvalidArgument if any interval is empty (lo > hi) or touches +-1.
  explicit ProbeSet(std::vector<Interval> intervals);

  static ProbeSet level(double c) { return ProbeSet({{c, c}}); }

  const std::vector<Interval>& intervals() const noexcept { return intervals_; }
  bool contains(double u) const noexcept;

 private:
  std::vector<Interval> intervals_;
};

/// Sorted positions approximating I_K[u] = u^{-1}(K): linearly interpolated
/// crossings of every boundary level of K, plus the nodes whose value lies
/// inside a non-degenerate interval of K.
struct InterfaceSet {
  std::vector<double> positions;
  ProbeSet probe;
};

InterfaceSet interface_set(const Field& u, const ProbeSet& probe = {});

}  // namespace degenac
