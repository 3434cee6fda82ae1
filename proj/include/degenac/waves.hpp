#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "degenac/model.hpp"

namespace degenac {

/// How Phi is evaluated.
enum class WaveShape { Tanh, Linear, Sine, Exp, AlgebraicSingle, NumericInversion };

std::string_view to_string(WaveShape s);

enum class WaveMethod {
  Auto,          ///< closed form when one matches (m, n, degeneracy)
  ForceNumeric,  ///< always invert the quadrature table
};

/// Support endpoints (omega_1, omega_2) of the standing wave. Infinite
/// endpoints are returned as -inf / +inf.
///   double: -omega_1 = omega_2 = eps int_0^1 sqrt(D / 2F), finite iff n < m + 2
///   single: omega_1 = -inf; omega_2 finite iff n < m + 2
std::pair<double, double> omega_eps(const ModelParams& p);

namespace detail {
struct InversionTable;
}

/// Continuous evaluator of the monotone standing wave Phi with Phi(0) = 0,
/// (eps^2 / 2) D(Phi) Phi'^2 = F(Phi), Phi -> -1 at omega_1 and +1 at omega_2.
/// Cheap to copy; the inversion table is shared.
class WaveFunction {
 public:
  WaveFunction(const ModelParams& p, WaveMethod method = WaveMethod::Auto);

  double operator()(double x) const;

  const ModelParams& params() const noexcept { return params_; }
  WaveShape shape() const noexcept { return shape_; }
  double omega1() const noexcept { return omega1_; }
  double omega2() const noexcept { return omega2_; }

 private:
  double closed_form(double x) const;

  ModelParams params_;
  WaveShape shape_;
  double omega1_;
  double omega2_;
  std::shared_ptr<const detail::InversionTable> table_;
};

/// Phi sampled on a sorted grid.
class StandingWave {
 public:
  /// Raw constructor: no consistency check between samples and params, so
  /// arbitrary fields can be certified with wave_residual. Throws
  /// InvalidArgument if sizes differ or xs is not strictly increasing.
  StandingWave(const ModelParams& p, double omega1, double omega2, std::vector<double> xs,
               std::vector<double> phis, WaveShape shape);

  const ModelParams& params() const noexcept { return params_; }
  double omega1() const noexcept { return omega1_; }
  double omega2() const noexcept { return omega2_; }
  std::span<const double> xs() const noexcept { return xs_; }
  std::span<const double> phis() const noexcept { return phis_; }
  WaveShape shape() const noexcept { return shape_; }

 private:
  ModelParams params_;
  double omega1_;
  double omega2_;
  std::vector<double> xs_;
  std::vector<double> phis_;
  WaveShape shape_;
};

/// Samples the standing wave on a strictly increasing grid.
StandingWave standing_wave(const ModelParams& p, std::span<const double> grid,
                           WaveMethod method = WaveMethod::Auto);

/// max over interior samples of |eps^2 D(Phi) Phi'^2 / 2 - F(Phi)| with Phi'
/// by three-point centered differences (non-uniform spacing allowed).
double wave_residual(const StandingWave& wave);

/// The pointwise residuals behind wave_residual; NaN at the two end samples.
std::vector<double> wave_residuals(const StandingWave& wave);

enum class TailSide { Left, Right };
enum class DecayClass { Finite, Exponential, Algebraic };

std::string_view to_string(DecayClass c);

struct DecayFit {
  DecayClass decay;
  /// Finite: the support endpoint on that side. Exponential: c in
  /// |1 -+ Phi| ~ e^{-c|x|}. Algebraic: p in |1 -+ Phi| ~ |x|^{-p}.
  double rate;
  double r_squared;
};

/// Tail classification on one side. Uses the outermost quarter of the samples
/// whose tail distance |1 -+ Phi| lies in (1e-10, 1e-2) and keeps the better of
/// the fits ln|1 -+ Phi| ~ x and ln|1 -+ Phi| ~ ln|x|. Throws InvalidArgument
/// when fewer than 4 samples qualify.
DecayFit decay_rate(const StandingWave& wave, TailSide side);

}  // namespace degenac
