#include "degenac/interface_set.hpp"

#include <algorithm>
#include <cmath>

#include "degenac/error.hpp"

namespace degenac {

ProbeSet::ProbeSet(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw InvalidArgument("probe set K must not be empty");
  for (const Interval& k : intervals_) {
    if (!(k.lo <= k.hi)) throw InvalidArgument("probe interval must satisfy lo <= hi");
    if (!(k.lo > -1.0 && k.hi < 1.0)) throw InvalidArgument("probe set K must lie strictly inside (-1, 1)");
  }
}

bool ProbeSet::contains(double u) const noexcept {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [u](const Interval& k) { return u >= k.lo && u <= k.hi; });
}

InterfaceSet interface_set(const Field& u, const ProbeSet& probe) {
  std::vector<double> levels;
  for (const auto& k : probe.intervals()) {
    levels.push_back(k.lo);
    if (k.hi != k.lo) levels.push_back(k.hi);
  }

  std::vector<double> out;
  for (double c : levels) {
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double gi = u[i] - c;
      if (gi == 0.0) {
        out.push_back(u.x(i));
        continue;
      }
      if (i + 1 < u.size()) {
        const double gj = u[i + 1] - c;
        if ((gi < 0.0 && gj > 0.0) || (gi > 0.0 && gj < 0.0)) {
          const double t = gi / (gi - gj);
          out.push_back(u.x(i) + t * (u.x(i + 1) - u.x(i)));
        }
      }
    }
  }
  for (const auto& k : probe.intervals()) {
    if (k.hi == k.lo) continue;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (u[i] > k.lo && u[i] < k.hi) out.push_back(u.x(i));
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return {std::move(out), probe};
}

}  // namespace degenac
