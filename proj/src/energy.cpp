#include "degenac/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "degenac/error.hpp"
#include "degenac/quadrature.hpp"

namespace degenac {

EnergyReport energy(const ModelParams& p, const Field& u, std::span<const double> panel_centers,
                    double panel_radius) {
  const double eps = p.epsilon();
  const double h = u.step();
  const std::size_t cells = u.cells();

  std::vector<double> d(u.size());
  std::vector<double> f(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    d[i] = diffusivity(p, u[i]);
    f[i] = potential(p, u[i]);
  }

  EnergyReport report;
  report.per_panel.reserve(panel_centers.size());
  for (double c : panel_centers) report.per_panel.push_back({c - panel_radius, c + panel_radius, 0.0});

  for (std::size_t c = 0; c < cells; ++c) {
    const double q = (u[c + 1] - u[c]) / h;
    const double grad = h * 0.5 * eps * 0.5 * (d[c] + d[c + 1]) * q * q;
    const double pot = h * 0.5 * (f[c] + f[c + 1]) / eps;
    report.gradient_part += grad;
    report.potential_part += pot;
    if (report.per_panel.empty()) continue;
    const double lo = u.x(c);
    const double hi = u.x(c + 1);
    for (PanelEnergy& panel : report.per_panel) {
      const double overlap = std::min(hi, panel.hi) - std::max(lo, panel.lo);
      if (overlap > 0.0) panel.energy += (grad + pot) * (overlap / (hi - lo));
    }
  }
  report.total = report.gradient_part + report.potential_part;
  return report;
}

double young_bound(const ModelParams& p, double u_c, double u_d) {
  if (!(std::isfinite(u_c) && std::isfinite(u_d))) throw InvalidArgument("young_bound: endpoints must be finite");
  if (u_c == u_d) return 0.0;
  auto integrand = [&p](double s) { return std::sqrt(2.0 * diffusivity(p, s) * potential(p, s)); };
  return integrate_adaptive(integrand, std::min(u_c, u_d), std::max(u_c, u_d), 1e-12).value;
}

ExponentSequence kj_sequence(const ModelParams& p, int j_max) {
  if (j_max < 1) throw InvalidArgument("kj_sequence: j_max must be >= 1");
  const double n = p.n();
  const double alpha = p.degeneracy() == Degeneracy::Double ? (n + p.m() + 2.0) / (2.0 * n)
                                                            : (n + 2.0) / (2.0 * n);
  ExponentSequence out;
  out.k = algebraic_exponents(p, j_max);
  out.beta = alpha < 1.0 ? alpha / (1.0 - alpha) : std::numeric_limits<double>::infinity();
  return out;
}

LowerBound lower_bound(const ModelParams& p, int transitions, double r, int j, std::optional<double> a) {
  if (transitions < 0) throw InvalidArgument("lower_bound: transition count must be >= 0");
  const SlowMotionScale scale = theta(p, r, a, j);
  return LowerBound(transitions * gamma_constant(p), scale);
}

TransitionCheck check_transition_structure(const ModelParams& p, const Field& u,
                                           const PiecewiseConstant& v, double delta,
                                           const TransitionCheckOptions& options) {
  if (u.a() != v.a() || u.b() != v.b()) throw InvalidArgument("field and jump function domains differ");
  TransitionCheck out{};
  out.l1_distance = l1_distance(u, [&v](double x) { return v(x); });
  const double n_gamma = static_cast<double>(v.jump_count()) * gamma_constant(p);
  out.energy_excess = energy(p, u).total - n_gamma;
  if (classify_regime(p).theta_case != ThetaCase::None) {
    out.theta = theta(p, options.r.value_or(max_r(v)))(p.epsilon());
  }
  out.is_tls = out.l1_distance <= delta &&
               out.energy_excess <= options.slack * out.theta + options.energy_tolerance;
  return out;
}

}  // namespace degenac
