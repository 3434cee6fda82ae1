#pragma once

#include <optional>
#include <span>
#include <vector>

#include "degenac/field.hpp"
#include "degenac/jump_function.hpp"
#include "degenac/model.hpp"

namespace degenac {

struct PanelEnergy {
  double lo;
  double hi;
  double energy;
};

struct EnergyReport {
  double total = 0.0;
  double gradient_part = 0.0;
  double potential_part = 0.0;
  /// One entry per requested panel (h_i - r, h_i + r), in request order.
  std::vector<PanelEnergy> per_panel;
};

/// Discrete Ginzburg-Landau energy
///   E = sum_cells h [ eps/2 * (D_i + D_{i+1})/2 * q^2 + (F_i + F_{i+1}) / (2 eps) ],
/// q = (u_{i+1} - u_i) / h. Cells cut by a panel contribute in proportion to
/// the overlap. The solver integrates the exact gradient flow of this sum.
EnergyReport energy(const ModelParams& p, const Field& u, std::span<const double> panel_centers = {},
                    double panel_radius = 0.0);

/// |int_{u_c}^{u_d} sqrt(2 D(s) F(s)) ds| by adaptive quadrature.
double young_bound(const ModelParams& p, double u_c, double u_d);

struct ExponentSequence {
  std::vector<double> k;
  /// alpha / (1 - alpha) when alpha < 1, +inf otherwise.
  double beta;
};

/// k_1..k_{j_max} and their limit. Throws InvalidArgument for j_max = 0.
ExponentSequence kj_sequence(const ModelParams& p, int j_max);

/// eps -> N gamma - theta(eps), with the unquantified constant in front of theta
/// set to 1.
class LowerBound {
 public:
  LowerBound(double n_gamma, SlowMotionScale scale) : n_gamma_(n_gamma), scale_(scale) {}
  double operator()(double epsilon) const { return n_gamma_ - scale_(epsilon); }
  double n_gamma() const noexcept { return n_gamma_; }
  const SlowMotionScale& scale() const noexcept { return scale_; }

 private:
  double n_gamma_;
  SlowMotionScale scale_;
};

/// Throws InvalidArgument when p has no slow-motion scale.
LowerBound lower_bound(const ModelParams& p, int transitions, double r, int j = 1,
                       std::optional<double> a = std::nullopt);

struct TransitionCheck {
  bool is_tls;
  double l1_distance;
  /// energy(u) - N gamma
  double energy_excess;
  /// theta(eps) used in the bound; 0 when the regime has none.
  double theta;
};

struct TransitionCheckOptions {
  double slack = 1.0;
  /// Absolute allowance for discretization error of the energy.
  double energy_tolerance = 1e-6;
  /// Radius entering theta; defaults to max_r(v).
  std::optional<double> r;
};

/// is_tls iff ||u - v||_{L1} <= delta and E(u) <= N gamma + slack theta(eps)
/// + energy_tolerance. Regimes without a catalog entry use theta = 0.
TransitionCheck check_transition_structure(const ModelParams& p, const Field& u,
                                           const PiecewiseConstant& v, double delta,
                                           const TransitionCheckOptions& options = {});

}  // namespace degenac
