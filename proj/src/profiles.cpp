#include "degenac/profiles.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "degenac/energy.hpp"
#include "degenac/error.hpp"

namespace degenac {

double epsilon_bar(const ModelParams& p, const PiecewiseConstant& v) {
  const double reach = omega_eps(p).second;
  if (!std::isfinite(reach)) return std::numeric_limits<double>::infinity();
  return max_r(v) / (reach / p.epsilon());
}

TransitionProfile build_profile(const ModelParams& p, const PiecewiseConstant& v, std::size_t cells,
                                const ProfileOptions& options) {
  const WaveFunction phi(p, options.method);
  const auto& h = v.jumps();
  const std::size_t count = h.size();

  std::vector<double> mids(count + 1);
  mids.front() = v.a();
  mids.back() = v.b();
  for (std::size_t i = 1; i < count; ++i) mids[i] = 0.5 * (h[i - 1] + h[i]);

  auto value = [&](double x) {
    if (count == 0) return static_cast<double>(v.first_value());
    // Panel i covers [m_i, m_{i+1}]; a shared midpoint goes to the left panel.
    std::size_t i = 0;
    while (i + 1 < count && x > mids[i + 1]) ++i;
    const double sigma = -static_cast<double>(v.value_before(i));
    return phi(sigma * (x - h[i]));
  };

  TransitionProfile out{Field::sample(v.a(), v.b(), cells, value), h, mids, false, 0.0, 0.0};
  out.epsilon_bar = epsilon_bar(p, v);

  const bool touching = classify_regime(p).tag == RegimeTag::TouchingWave;
  const double reach = phi.omega2();
  const bool glued = touching && count > 0 && reach <= max_r(v);
  if (p.degeneracy() == Degeneracy::Double) {
    out.stationary = glued;
  } else {
    out.stationary = glued && count % 2 == 0 && v.first_value() == 1;
  }
  if (options.require_stationary && !out.stationary) {
    std::ostringstream os;
    os << "profile is not stationary: ";
    if (!touching) {
      os << "the standing wave does not touch +1 (n >= m + 2)";
    } else if (count == 0) {
      os << "no transitions";
    } else if (!(reach <= max_r(v))) {
      os << "epsilon = " << p.epsilon() << " is not below epsilon_bar = " << out.epsilon_bar;
    } else {
      os << "single degeneracy needs an even transition count with first_value +1";
    }
    throw InvalidArgument(os.str());
  }
  out.energy = energy(p, out.field).total;
  return out;
}

std::pair<double, double> check_neumann(const Field& u) {
  const double h = u.step();
  const std::size_t last = u.cells();
  return {(u[1] - u[0]) / h, (u[last] - u[last - 1]) / h};
}

}  // namespace degenac
