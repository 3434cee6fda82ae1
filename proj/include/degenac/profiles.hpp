#pragma once

#include <utility>
#include <vector>

#include "degenac/field.hpp"
#include "degenac/jump_function.hpp"
#include "degenac/model.hpp"
#include "degenac/waves.hpp"

namespace degenac {

/// Glued N-layer profile phi_N.
struct TransitionProfile {
  Field field;
  std::vector<double> jumps;
  /// m_1 = a, m_i = (h_{i-1} + h_i) / 2, m_{N+1} = b.
  std::vector<double> midpoints;
  bool stationary = false;
  double energy = 0.0;
  /// +inf when the regime has no compacton threshold.
  double epsilon_bar = 0.0;
};

/// delta_N / (omega / eps), or +inf when the wave does not touch +1
/// (n >= m + 2). delta_N is max_r(v).
double epsilon_bar(const ModelParams& p, const PiecewiseConstant& v);

struct ProfileOptions {
  /// Throw InvalidArgument unless the glued profile is an exact stationary
  /// solution.
  bool require_stationary = false;
  WaveMethod method = WaveMethod::Auto;
};

/// phi(x) = Phi(sigma_i (x - h_i)) on [m_i, m_{i+1}], where sigma_i = +1 when
/// v steps up across h_i and -1 when it steps down. v.first_value() = -1
/// reproduces Phi((-1)^{i+1}(x - h_i)); first_value = +1 gives Phi((-1)^i (x - h_i)).
///
/// stationary is set when
///   double: n < m + 2 and omega <= delta_N (the boundary case included)
///   single: n < m + 2, N even, first_value = +1 and omega_2 <= delta_N
/// and false otherwise.
TransitionProfile build_profile(const ModelParams& p, const PiecewiseConstant& v, std::size_t cells,
                                const ProfileOptions& options = {});

/// One-sided difference quotients (u_1 - u_0)/h and (u_M - u_{M-1})/h.
std::pair<double, double> check_neumann(const Field& u);

}  // namespace degenac
