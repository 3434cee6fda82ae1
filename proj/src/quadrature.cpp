#include "degenac/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "degenac/error.hpp"

namespace degenac {

namespace {

// Kronrod abscissae on [0, 1); odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool splittable;

  bool operator<(const Panel& other) const {
    // Unsplittable panels sink below every splittable one.
    if (splittable != other.splittable) return !splittable;
    return error < other.error;
  }
};

Panel gauss_kronrod(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kXgk[static_cast<std::size_t>(i)];
    const double sum = f(center - dx) + f(center + dx);
    kronrod += kWgk[static_cast<std::size_t>(i)] * sum;
    if (i % 2 == 1) gauss += kWg[static_cast<std::size_t>(i / 2)] * sum;
  }
  kronrod *= half;
  gauss *= half;

  // A panel only a few ulps wide cannot be bisected into distinct nodes.
  const double scale = std::max(std::fabs(a), std::fabs(b));
  const double floor_width = 64.0 * std::numeric_limits<double>::epsilon() * std::max(scale, 1e-300);
  const bool splittable = (b - a) > floor_width;
  // |K - G| is unreliable on a panel that still holds a singularity; charge
  // the whole contribution instead.
  const double error = splittable ? std::fabs(kronrod - gauss) : std::max(std::fabs(kronrod - gauss), std::fabs(kronrod));
  return {a, b, kronrod, error, splittable};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              const QuadOptions& options) {
  if (!(a < b)) throw InvalidArgument("integrate_adaptive requires a < b");
  if (!(options.tolerance > 0.0)) throw InvalidArgument("quadrature tolerance must be > 0");

  std::priority_queue<Panel> panels;
  std::size_t evaluations = 0;
  auto evaluate = [&](double lo, double hi) {
    evaluations += 15;
    return gauss_kronrod(f, lo, hi);
  };

  Panel first = evaluate(a, b);
  double total_error = first.error;
  double total_value = first.value;
  // Error held by panels too narrow to split; bisecting elsewhere cannot remove it.
  double stuck_error = first.splittable ? 0.0 : first.error;
  panels.push(first);

  while (total_error > options.tolerance && total_error - stuck_error > options.tolerance) {
    const Panel worst = panels.top();
    if (!worst.splittable) break;
    // Roundoff floor: further bisection cannot improve on this.
    if (total_error <= 50.0 * std::numeric_limits<double>::epsilon() * std::fabs(total_value)) break;
    if (panels.size() >= options.panel_budget) {
      std::ostringstream os;
      os << "integrate_adaptive did not converge on [" << a << ", " << b << "] within "
         << options.panel_budget << " panels (error estimate " << total_error << ")";
      throw NumericalError(os.str(), total_value);
    }
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate(worst.a, mid);
    Panel right = evaluate(mid, worst.b);
    total_error += left.error + right.error - worst.error;
    total_value += left.value + right.value - worst.value;
    if (!left.splittable) stuck_error += left.error;
    if (!right.splittable) stuck_error += right.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum from the partition to shed the drift of the running updates.
  QuadResult result;
  result.evaluations = evaluations;
  std::vector<Panel> parts;
  parts.reserve(panels.size());
  while (!panels.empty()) {
    parts.push_back(panels.top());
    panels.pop();
  }
  double value = 0.0;
  double compensation = 0.0;
  double error = 0.0;
  for (const Panel& p : parts) {
    const double y = p.value - compensation;
    const double t = value + y;
    compensation = (t - value) - y;
    value = t;
    error += p.error;
  }
  result.value = value;
  result.error_estimate = error;
  if (!std::isfinite(value)) throw NumericalError("integrate_adaptive produced a non-finite value", value);
  return result;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw InvalidArgument("log_gamma requires x > 0");
  static constexpr std::array<double, 9> kLanczos = {
      0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
      771.32342877765313,      -176.61502916214059,   12.507343278686905,
      -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + 7.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

double gamma_constant(const ModelParams& p) {
  auto integrand = [&p](double s) {
    return std::sqrt(2.0 * diffusivity(p, s) * potential(p, s));
  };
  return integrate_adaptive(integrand, -1.0, 1.0, 1e-10).value;
}

std::optional<double> gamma_closed_form(const ModelParams& p) {
  const double m = p.m();
  const double n = p.n();
  if (p.degeneracy() == Degeneracy::Double) {
    const bool n_integer = std::fabs(n - std::round(n)) < 1e-12;
    if (!n_integer || std::fabs(n - (m + 2.0)) > 1e-12) return std::nullopt;
    // [2^n (n-1)!]^2 / (2 sqrt(n) (2n-1)!) in log space.
    const double log_value = 2.0 * (n * std::log(2.0) + log_gamma(n)) - std::log(2.0) -
                             0.5 * std::log(n) - log_gamma(2.0 * n);
    return std::exp(log_value);
  }
  if (std::fabs(n - 2.0) > 1e-12) return std::nullopt;
  return 4.0 * std::pow(2.0, (m + 5.0) / 2.0) / ((m + 4.0) * (m + 6.0));
}

double gamma_beta_identity(const ModelParams& p) {
  const double k = p.n() + p.m();
  return std::sqrt(std::numbers::pi) *
         std::exp(log_gamma((k + 2.0) / 2.0) - log_gamma((k + 3.0) / 2.0)) / std::sqrt(p.n());
}

double gamma_beta_identity_unshifted(const ModelParams& p) {
  const double k = p.n() + p.m();
  return std::sqrt(std::numbers::pi) * std::exp(log_gamma(k / 2.0) - log_gamma((k + 3.0) / 2.0)) /
         std::sqrt(p.n());
}

}  // namespace degenac
