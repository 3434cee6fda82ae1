#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace degenac {

/// Which wells the diffusivity vanishes at.
///   Double: D(u) = |1-u^2|^m   (zero at u = -1 and u = +1)
///   Single: D(u) = |1-u|^m     (zero at u = +1 only)
/// In both cases F(u) = |1-u^2|^n / (2n).
enum class Degeneracy { Double, Single };

enum class RegimeTag { TouchingWave, ExponentialTails, AlgebraicTails };

/// Slow-motion catalog entry; None when no remainder scale is available.
enum class ThetaCase { E1, E2, E3, E4, E5, None };

struct Regime {
  RegimeTag tag;
  ThetaCase theta_case;
};

std::string_view to_string(Degeneracy d);
std::string_view to_string(RegimeTag t);
std::string_view to_string(ThetaCase c);
Degeneracy parse_degeneracy(std::string_view text);

/// Exponents, interface width and degeneracy kind. Immutable once built;
/// construct through make_params so every instance is validated.
class ModelParams {
 public:
  double m() const noexcept { return m_; }
  double n() const noexcept { return n_; }
  double epsilon() const noexcept { return epsilon_; }
  Degeneracy degeneracy() const noexcept { return degeneracy_; }

  /// True when m <= 1. Closed forms still apply but the slow-motion theory
  /// assumes m > 1.
  bool outside_hypotheses() const noexcept { return m_ <= 1.0; }

  /// Same exponents and degeneracy with a different epsilon.
  ModelParams with_epsilon(double epsilon) const;

  friend ModelParams make_params(double m, double n, double epsilon, Degeneracy degeneracy);

 private:
  ModelParams(double m, double n, double epsilon, Degeneracy degeneracy)
      : m_(m), n_(n), epsilon_(epsilon), degeneracy_(degeneracy) {}

  double m_;
  double n_;
  double epsilon_;
  Degeneracy degeneracy_;
};

/// Validates epsilon > 0, n >= 2, m >= 0 (all finite). Throws InvalidArgument
/// naming the violated bound.
ModelParams make_params(double m, double n, double epsilon, Degeneracy degeneracy);

double diffusivity(const ModelParams& p, double u);
double diffusivity_prime(const ModelParams& p, double u);
double potential(const ModelParams& p, double u);
double potential_prime(const ModelParams& p, double u);

Regime classify_regime(const ModelParams& p);

/// Exponents k_1..k_count of the algebraic remainder eps^{k_j}.
///   Double: k_1 = 0, k_2 = alpha, k_{j+1} = alpha (k_j + 1), alpha = (n+m+2)/(2n)
///   Single: k_1 = 0, k_2 = (n+1)/(2n), k_{j+1} = (n+2)/(2n) (k_j + 1)
std::vector<double> algebraic_exponents(const ModelParams& p, int count);

/// theta(eps): the remainder that controls how long an N-layer structure
/// persists. Either exp(-rate / eps) or eps^power.
class SlowMotionScale {
 public:
  enum class Kind { Exponential, Algebraic };

  SlowMotionScale(ThetaCase which, Kind kind, double coefficient)
      : case_(which), kind_(kind), coefficient_(coefficient) {}

  double operator()(double epsilon) const;

  ThetaCase theta_case() const noexcept { return case_; }
  Kind kind() const noexcept { return kind_; }
  /// Exponential: the rate c in exp(-c/eps). Algebraic: the power k in eps^k.
  double coefficient() const noexcept { return coefficient_; }

 private:
  ThetaCase case_;
  Kind kind_;
  double coefficient_;
};

/// Default fraction of the admissible supremum used for A.
inline constexpr double kDefaultAFraction = 0.9;

/// Supremum of the admissible A for the exponential cases (4r, 2r or
/// 2^{(2-m)/2} r). Throws for algebraic or None cases.
double theta_a_supremum(const ModelParams& p, double r);

/// Builds theta for the catalog entry of p.
///   E1: exp(-A sqrt(n) / eps)      A in (0, 4r)
///   E2: exp(-A / eps)              A in (0, 2r)
///   E3: exp(-A / eps)              A in (0, 2^{(2-m)/2} r)
///   E4, E5: eps^{k_{j+1}}
/// A defaults to kDefaultAFraction of the supremum; j defaults to 1.
/// Throws InvalidArgument for ThetaCase::None, r <= 0, j < 1 or A outside
/// the open admissible interval.
SlowMotionScale theta(const ModelParams& p, double r, std::optional<double> a = std::nullopt,
                      std::optional<int> j = std::nullopt);

}  // namespace degenac
