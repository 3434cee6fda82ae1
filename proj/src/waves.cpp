#include "degenac/waves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "degenac/error.hpp"
#include "degenac/quadrature.hpp"
#include "degenac/regression.hpp"

namespace degenac {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Half-table resolution and reach in z = |atanh(Phi)|.
constexpr int kHalfIntervals = 2048;
constexpr double kMaxZ = 40.0;

bool same(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

double softplus(double a) { return std::max(a, 0.0) + std::log1p(std::exp(-std::fabs(a))); }

}  // namespace

namespace detail {

// Inverse of xi(Phi) = int_0^Phi sqrt(D / 2F) ds, tabulated in y = atanh(Phi)
// so that 1 -+ Phi never has to be formed by cancellation.
//
// Each half-line is stored in a mirrored coordinate z = |y| >= 0 with xi
// increasing from 0. Past the last node the integrand behaves like
// slope_end * exp(-2 q (z - z_end)), which integrates in closed form:
//   q > 0  touching: xi reaches xi_end + slope_end / (2q) at Phi = +-1
//   q = 0  exponential tail
//   q < 0  algebraic tail
struct InversionTable {
  struct Side {
    std::vector<double> z;
    std::vector<double> xi;
    std::vector<double> slope;
    double q = 0.0;

    double xi_limit() const {
      return q > 0.0 ? xi.back() + slope.back() / (2.0 * q) : kInf;
    }
    double invert(double target) const;
  };

  Side right;
  Side left;
};

namespace {

// Solves the cubic Hermite interpolant of xi(z) on one segment for z.
double hermite_solve(double z0, double z1, double x0, double x1, double s0, double s1,
                     double target) {
  const double h = z1 - z0;
  auto value = [&](double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * x0 + (t3 - 2 * t2 + t) * h * s0 + (-2 * t3 + 3 * t2) * x1 +
           (t3 - t2) * h * s1;
  };
  auto derivative = [&](double t) {
    const double t2 = t * t;
    return (6 * t2 - 6 * t) * x0 + (3 * t2 - 4 * t + 1) * h * s0 + (-6 * t2 + 6 * t) * x1 +
           (3 * t2 - 2 * t) * h * s1;
  };
  double lo = 0.0;
  double hi = 1.0;
  double t = x1 > x0 ? std::clamp((target - x0) / (x1 - x0), 0.0, 1.0) : 0.5;
  for (int iter = 0; iter < 60; ++iter) {
    const double f = value(t) - target;
    if (f == 0.0) break;
    if (f < 0.0) {
      lo = t;
    } else {
      hi = t;
    }
    const double d = derivative(t);
    double next = d > 0.0 ? t - f / d : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) < 1e-15) {
      t = next;
      break;
    }
    t = next;
  }
  return z0 + t * h;
}

}  // namespace

double InversionTable::Side::invert(double target) const {
  if (target <= 0.0) return 0.0;
  if (target <= xi.back()) {
    const auto it = std::upper_bound(xi.begin(), xi.end(), target);
    const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - xi.begin() - 1, 0));
    if (k + 1 >= xi.size()) return z.back();
    return hermite_solve(z[k], z[k + 1], xi[k], xi[k + 1], slope[k], slope[k + 1], target);
  }
  const double excess = target - xi.back();
  if (q == 0.0) return z.back() + excess / slope.back();
  const double arg = 1.0 - 2.0 * q * excess / slope.back();
  if (arg <= 0.0) return kInf;
  return z.back() - std::log(arg) / (2.0 * q);
}

}  // namespace detail

namespace {

// log of d xi / dy at y = atanh(Phi), written through 1 - Phi = 2 / (1 + e^{2y})
// and 1 + Phi = 2 / (1 + e^{-2y}).
double log_dxi_dy(const ModelParams& p, double y) {
  const double m = p.m();
  const double n = p.n();
  const double log_hi = std::numbers::ln2 - softplus(2.0 * y);
  const double log_lo = std::numbers::ln2 - softplus(-2.0 * y);
  const double log_root_n = 0.5 * std::log(n);
  if (p.degeneracy() == Degeneracy::Double) {
    // sqrt(n) (1 - Phi^2)^{(m - n)/2} * (1 - Phi^2)
    return log_root_n + (0.5 * (m - n) + 1.0) * (log_hi + log_lo);
  }
  // sqrt(n) (1 - Phi)^{(m - n)/2} (1 + Phi)^{-n/2} * (1 - Phi)(1 + Phi)
  return log_root_n + (0.5 * (m - n) + 1.0) * log_hi + (1.0 - 0.5 * n) * log_lo;
}

detail::InversionTable::Side build_side(const ModelParams& p, double direction, double q) {
  detail::InversionTable::Side side;
  side.q = q;
  // log(d xi / dy) ~ -2 q z. Algebraic tails stop before xi overflows;
  // touching tails stop while increments still register against xi, the
  // closed-form closure past z_end being accurate to O(e^{-2 z_end}).
  double z_end = kMaxZ;
  if (q < 0.0) z_end = std::min(kMaxZ, 300.0 / (-2.0 * q));
  if (q > 0.0) z_end = std::min(kMaxZ, 12.0 / q);
  const double dz = z_end / kHalfIntervals;
  auto rate = [&](double z) { return std::exp(log_dxi_dy(p, direction * z)); };

  side.z.resize(kHalfIntervals + 1);
  side.xi.resize(kHalfIntervals + 1);
  side.slope.resize(kHalfIntervals + 1);
  side.z[0] = 0.0;
  side.xi[0] = 0.0;
  side.slope[0] = rate(0.0);
  for (int k = 1; k <= kHalfIntervals; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double z0 = side.z[i - 1];
    const double z1 = k == kHalfIntervals ? z_end : static_cast<double>(k) * dz;
    side.z[i] = z1;
    side.slope[i] = rate(z1);
    const double scale = std::max(side.slope[i - 1], side.slope[i]) * (z1 - z0);
    const double piece = integrate_adaptive(rate, z0, z1, std::max(1e-15 * scale, 1e-300)).value;
    side.xi[i] = side.xi[i - 1] + piece;
  }
  for (std::size_t i = 1; i < side.xi.size(); ++i) {
    if (!(side.xi[i] > side.xi[i - 1])) {
      throw NumericalError("standing wave inversion table is not strictly increasing");
    }
  }
  return side;
}

double side_exponent_right(const ModelParams& p) {
  if (classify_regime(p).tag == RegimeTag::ExponentialTails) return 0.0;
  return 0.5 * (p.m() - p.n()) + 1.0;
}

double side_exponent_left(const ModelParams& p) {
  if (p.degeneracy() == Degeneracy::Double) return side_exponent_right(p);
  if (same(p.n(), 2.0)) return 0.0;
  return 1.0 - 0.5 * p.n();
}

WaveShape pick_shape(const ModelParams& p, WaveMethod method) {
  if (method == WaveMethod::ForceNumeric) return WaveShape::NumericInversion;
  const double m = p.m();
  const double n = p.n();
  if (p.degeneracy() == Degeneracy::Double) {
    if (same(n, m + 2.0)) return WaveShape::Tanh;
    if (same(n, m)) return WaveShape::Linear;
    if (same(n, m + 1.0)) return WaveShape::Sine;
    return WaveShape::NumericInversion;
  }
  if (same(n, m) && same(n, 2.0)) return WaveShape::Exp;
  if (same(n, m) && n > 2.0) return WaveShape::AlgebraicSingle;
  return WaveShape::NumericInversion;
}

}  // namespace

std::string_view to_string(WaveShape s) {
  switch (s) {
    case WaveShape::Tanh: return "tanh";
    case WaveShape::Linear: return "linear";
    case WaveShape::Sine: return "sine";
    case WaveShape::Exp: return "exp";
    case WaveShape::AlgebraicSingle: return "algebraic_single";
    case WaveShape::NumericInversion: return "numeric_inversion";
  }
  return "?";
}

std::string_view to_string(DecayClass c) {
  switch (c) {
    case DecayClass::Finite: return "Finite";
    case DecayClass::Exponential: return "Exponential";
    case DecayClass::Algebraic: return "Algebraic";
  }
  return "?";
}

std::pair<double, double> omega_eps(const ModelParams& p) {
  if (classify_regime(p).tag != RegimeTag::TouchingWave) return {-kInf, kInf};

  // sqrt(D / 2F) on [0, 1] in the variable t = 1 - s; the endpoint singularity
  // t^{(m-n)/2} is integrable and resolved by adaptive bisection.
  const double m = p.m();
  const double n = p.n();
  const bool single = p.degeneracy() == Degeneracy::Single;
  auto integrand = [=](double t) {
    const double other = 2.0 - t;
    if (single) return std::sqrt(n) * std::pow(t, 0.5 * (m - n)) * std::pow(other, -0.5 * n);
    return std::sqrt(n) * std::pow(t * other, 0.5 * (m - n));
  };
  QuadOptions options;
  options.tolerance = 1e-10;
  options.panel_budget = 20000;
  const double omega = p.epsilon() * integrate_adaptive(integrand, 0.0, 1.0, options).value;
  return {single ? -kInf : -omega, omega};
}

WaveFunction::WaveFunction(const ModelParams& p, WaveMethod method)
    : params_(p), shape_(pick_shape(p, method)), omega1_(-kInf), omega2_(kInf) {
  const double eps = p.epsilon();
  const double root_n = std::sqrt(p.n());
  switch (shape_) {
    case WaveShape::Tanh: break;
    case WaveShape::Linear:
      omega2_ = root_n * eps;
      omega1_ = -omega2_;
      break;
    case WaveShape::Sine:
      omega2_ = 0.5 * std::numbers::pi * root_n * eps;
      omega1_ = -omega2_;
      break;
    case WaveShape::Exp: omega2_ = std::numbers::sqrt2 * std::numbers::ln2 * eps; break;
    case WaveShape::AlgebraicSingle: {
      const double n = p.n();
      omega2_ = 2.0 * root_n / (2.0 - n) * (std::pow(2.0, (2.0 - n) / 2.0) - 1.0) * eps;
      break;
    }
    case WaveShape::NumericInversion: {
      auto table = std::make_shared<detail::InversionTable>();
      table->right = build_side(p, +1.0, side_exponent_right(p));
      table->left = build_side(p, -1.0, side_exponent_left(p));
      omega2_ = eps * table->right.xi_limit();
      omega1_ = -eps * table->left.xi_limit();
      table_ = std::move(table);
      break;
    }
  }
}

double WaveFunction::closed_form(double x) const {
  const double eps = params_.epsilon();
  const double root_n = std::sqrt(params_.n());
  switch (shape_) {
    case WaveShape::Tanh: return std::tanh(x / (root_n * eps));
    case WaveShape::Linear: return std::clamp(x / (root_n * eps), -1.0, 1.0);
    case WaveShape::Sine: {
      if (x >= omega2_) return 1.0;
      if (x <= omega1_) return -1.0;
      return std::sin(x / (root_n * eps));
    }
    case WaveShape::Exp: {
      if (x >= omega2_) return 1.0;
      return std::expm1(x / (std::numbers::sqrt2 * eps));
    }
    case WaveShape::AlgebraicSingle: {
      if (x >= omega2_) return 1.0;
      const double n = params_.n();
      const double base = 2.0 * root_n * eps / ((2.0 - n) * x + 2.0 * root_n * eps);
      return std::min(std::pow(base, 2.0 / (n - 2.0)) - 1.0, 1.0);
    }
    case WaveShape::NumericInversion: break;
  }
  return 0.0;
}

double WaveFunction::operator()(double x) const {
  if (!table_) return closed_form(x);
  const double xi = x / params_.epsilon();
  if (xi >= 0.0) {
    const double z = table_->right.invert(xi);
    return std::isinf(z) ? 1.0 : std::tanh(z);
  }
  const double z = table_->left.invert(-xi);
  return std::isinf(z) ? -1.0 : -std::tanh(z);
}

StandingWave::StandingWave(const ModelParams& p, double omega1, double omega2,
                           std::vector<double> xs, std::vector<double> phis, WaveShape shape)
    : params_(p),
      omega1_(omega1),
      omega2_(omega2),
      xs_(std::move(xs)),
      phis_(std::move(phis)),
      shape_(shape) {
  if (xs_.size() != phis_.size()) throw InvalidArgument("standing wave: xs and phis differ in length");
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw InvalidArgument("standing wave grid must be strictly increasing");
  }
}

StandingWave standing_wave(const ModelParams& p, std::span<const double> grid, WaveMethod method) {
  const WaveFunction phi(p, method);
  std::vector<double> xs(grid.begin(), grid.end());
  std::vector<double> values(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) values[i] = phi(xs[i]);
  return StandingWave(p, phi.omega1(), phi.omega2(), std::move(xs), std::move(values), phi.shape());
}

std::vector<double> wave_residuals(const StandingWave& wave) {
  const auto xs = wave.xs();
  const auto u = wave.phis();
  const ModelParams& p = wave.params();
  const double eps2 = p.epsilon() * p.epsilon();
  std::vector<double> out(xs.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double hm = xs[i] - xs[i - 1];
    const double hp = xs[i + 1] - xs[i];
    const double du = (hm * hm * u[i + 1] - hp * hp * u[i - 1] - (hm * hm - hp * hp) * u[i]) /
                      (hm * hp * (hm + hp));
    out[i] = std::fabs(0.5 * eps2 * diffusivity(p, u[i]) * du * du - potential(p, u[i]));
  }
  return out;
}

double wave_residual(const StandingWave& wave) {
  double worst = 0.0;
  for (double r : wave_residuals(wave)) {
    if (!std::isnan(r)) worst = std::max(worst, r);
  }
  return worst;
}

DecayFit decay_rate(const StandingWave& wave, TailSide side) {
  const bool right = side == TailSide::Right;
  const double endpoint = right ? wave.omega2() : wave.omega1();
  if (std::isfinite(endpoint)) return {DecayClass::Finite, endpoint, 1.0};

  std::vector<double> abs_x;
  std::vector<double> log_tail;
  const auto xs = wave.xs();
  const auto phis = wave.phis();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const bool on_side = right ? xs[i] > 0.0 : xs[i] < 0.0;
    const double tail = right ? 1.0 - phis[i] : 1.0 + phis[i];
    if (on_side && tail > 1e-10 && tail < 1e-2) {
      abs_x.push_back(std::fabs(xs[i]));
      log_tail.push_back(std::log(tail));
    }
  }
  if (abs_x.size() < 4) throw InvalidArgument("decay_rate: fewer than 4 tail samples in (1e-10, 1e-2)");

  // Outermost quarter, at least 4 points.
  std::vector<std::size_t> order(abs_x.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return abs_x[a] > abs_x[b]; });
  const std::size_t keep = std::max<std::size_t>(4, (order.size() + 3) / 4);
  std::vector<double> xv;
  std::vector<double> lv;
  std::vector<double> yv;
  for (std::size_t k = 0; k < keep; ++k) {
    xv.push_back(abs_x[order[k]]);
    lv.push_back(std::log(abs_x[order[k]]));
    yv.push_back(log_tail[order[k]]);
  }
  const LineFit exp_fit = fit_line(xv, yv);
  const LineFit alg_fit = fit_line(lv, yv);
  if (exp_fit.r_squared >= alg_fit.r_squared) {
    return {DecayClass::Exponential, -exp_fit.slope, exp_fit.r_squared};
  }
  return {DecayClass::Algebraic, -alg_fit.slope, alg_fit.r_squared};
}

}  // namespace degenac
