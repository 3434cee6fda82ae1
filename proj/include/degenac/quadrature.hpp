#pragma once

#include <cstddef>
#include <functional>
#include <optional>

#include "degenac/model.hpp"

namespace degenac {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double tolerance = 1e-10;
  /// Maximum number of panels kept in the adaptive partition.
  std::size_t panel_budget = 4000;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// estimate drops below the tolerance. Nodes never touch the endpoints, so
/// integrable endpoint singularities are handled by the bisection grading
/// geometrically toward them. Panels narrower than a few ulps of their
/// location cannot be split further; their error stays in the estimate and
/// the call returns rather than throws, so |value - I| <= max(tol, estimate)
/// still holds.
///
/// Throws InvalidArgument unless a < b, NumericalError (carrying the best
/// estimate) when the panel budget runs out.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadOptions& options = {});

inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     double tolerance) {
  return integrate_adaptive(f, a, b, QuadOptions{tolerance, QuadOptions{}.panel_budget});
}

/// ln Gamma(x) for x > 0 (Lanczos, g = 7, 9 terms). Throws for x <= 0.
double log_gamma(double x);

/// gamma = int_{-1}^{1} sqrt(2 D(s) F(s)) ds by adaptive quadrature at 1e-10.
double gamma_constant(const ModelParams& p);

/// Closed forms for gamma where one is known:
///   double, n = m + 2 with integer n:  [2^n (n-1)!]^2 / (2 sqrt(n) (2n-1)!)
///   single, n = 2:                     4 * 2^{(m+5)/2} / ((m+4)(m+6))
std::optional<double> gamma_closed_form(const ModelParams& p);

/// Double-degenerate gamma through the half-integer Beta identity
///   (1/sqrt n) int (1-s^2)^{(n+m)/2} ds = sqrt(pi) G((n+m+2)/2) / (sqrt(n) G((n+m+3)/2)).
double gamma_beta_identity(const ModelParams& p);

/// The same expression with G((n+m)/2) in the numerator. It does not equal
/// gamma; reported alongside so the two can be compared.
double gamma_beta_identity_unshifted(const ModelParams& p);

}  // namespace degenac
