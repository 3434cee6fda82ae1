#include "degenac/jump_function.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degenac/error.hpp"

namespace degenac {

PiecewiseConstant make_jump_function(double a, double b, std::vector<double> jumps, int first_value) {
  if (!(std::isfinite(a) && std::isfinite(b) && a < b)) {
    throw InvalidArgument("jump function domain requires finite a < b");
  }
  if (first_value != 1 && first_value != -1) throw InvalidArgument("first_value must be -1 or +1");
  for (std::size_t i = 0; i < jumps.size(); ++i) {
    const double h = jumps[i];
    if (!(h > a && h < b)) {
      std::ostringstream os;
      os << "jump " << h << " lies outside the open domain (" << a << ", " << b << ")";
      throw InvalidArgument(os.str());
    }
    if (i > 0 && !(h > jumps[i - 1])) throw InvalidArgument("jumps must be strictly increasing");
  }
  return PiecewiseConstant(a, b, std::move(jumps), first_value);
}

double PiecewiseConstant::operator()(double x) const {
  const auto crossed = std::upper_bound(jumps_.begin(), jumps_.end(), x) - jumps_.begin();
  return static_cast<double>(value_before(static_cast<std::size_t>(crossed)));
}

double max_r(const PiecewiseConstant& v) {
  const auto& h = v.jumps();
  if (h.empty()) return v.b() - v.a();
  double r = std::min(h.front() - v.a(), v.b() - h.back());
  for (std::size_t i = 1; i < h.size(); ++i) r = std::min(r, 0.5 * (h[i] - h[i - 1]));
  return r;
}

}  // namespace degenac
