#include "degenac/model.hpp"

#include <cmath>
#include <sstream>

#include "degenac/error.hpp"

namespace degenac {

namespace {

// Exponent comparisons come from user input such as 2, 4.0 or 1.5; a relative
// guard keeps n = m + 2 recognizable after decimal round trips.
bool nearly_equal(double a, double b) {
  return std::fabs(a - b) <= 1e-12 * std::max({1.0, std::fabs(a), std::fabs(b)});
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// |s|^(p-1) * sign(s), with the value at s = 0 taken as 0. For p > 1 this is
// the exact limit; for p <= 1 it picks the zero subgradient.
double signed_power_minus_one(double s, double p) {
  if (s == 0.0) return 0.0;
  return std::pow(std::fabs(s), p - 1.0) * sign_of(s);
}

[[noreturn]] void reject(const std::string& what) { throw InvalidArgument(what); }

}  // namespace

std::string_view to_string(Degeneracy d) {
  return d == Degeneracy::Double ? "double" : "single";
}

std::string_view to_string(RegimeTag t) {
  switch (t) {
    case RegimeTag::TouchingWave: return "TouchingWave";
    case RegimeTag::ExponentialTails: return "ExponentialTails";
    case RegimeTag::AlgebraicTails: return "AlgebraicTails";
  }
  return "?";
}

std::string_view to_string(ThetaCase c) {
  switch (c) {
    case ThetaCase::E1: return "E1";
    case ThetaCase::E2: return "E2";
    case ThetaCase::E3: return "E3";
    case ThetaCase::E4: return "E4";
    case ThetaCase::E5: return "E5";
    case ThetaCase::None: return "None";
  }
  return "?";
}

Degeneracy parse_degeneracy(std::string_view text) {
  if (text == "double") return Degeneracy::Double;
  if (text == "single") return Degeneracy::Single;
  reject("degeneracy must be \"double\" or \"single\", got \"" + std::string(text) + "\"");
}

ModelParams make_params(double m, double n, double epsilon, Degeneracy degeneracy) {
  if (!std::isfinite(m)) reject("m must be finite");
  if (!std::isfinite(n)) reject("n must be finite");
  if (!std::isfinite(epsilon)) reject("epsilon must be finite");
  if (!(epsilon > 0.0)) reject("epsilon must be > 0");
  if (n < 2.0) reject("n below 2 (n must be >= 2)");
  if (m < 0.0) reject("m below 0 (m must be >= 0)");
  return ModelParams(m, n, epsilon, degeneracy);
}

ModelParams ModelParams::with_epsilon(double epsilon) const {
  return make_params(m_, n_, epsilon, degeneracy_);
}

double diffusivity(const ModelParams& p, double u) {
  const double s = p.degeneracy() == Degeneracy::Double ? (1.0 - u) * (1.0 + u) : 1.0 - u;
  return std::pow(std::fabs(s), p.m());
}

double diffusivity_prime(const ModelParams& p, double u) {
  if (p.m() == 0.0) return 0.0;
  if (p.degeneracy() == Degeneracy::Double) {
    const double s = (1.0 - u) * (1.0 + u);
    return p.m() * signed_power_minus_one(s, p.m()) * (-2.0 * u);
  }
  const double s = 1.0 - u;
  return -p.m() * signed_power_minus_one(s, p.m());
}

double potential(const ModelParams& p, double u) {
  return std::pow(std::fabs((1.0 - u) * (1.0 + u)), p.n()) / (2.0 * p.n());
}

double potential_prime(const ModelParams& p, double u) {
  const double s = (1.0 - u) * (1.0 + u);
  return -u * signed_power_minus_one(s, p.n());
}

Regime classify_regime(const ModelParams& p) {
  const double m = p.m();
  const double n = p.n();
  RegimeTag tag;
  if (nearly_equal(n, m + 2.0)) {
    tag = RegimeTag::ExponentialTails;
  } else if (n < m + 2.0) {
    tag = RegimeTag::TouchingWave;
  } else {
    tag = RegimeTag::AlgebraicTails;
  }

  ThetaCase which = ThetaCase::None;
  if (p.degeneracy() == Degeneracy::Double) {
    if (tag == RegimeTag::ExponentialTails) {
      if (m > 2.0) {
        which = ThetaCase::E1;
      } else if (m > 1.0) {
        which = ThetaCase::E2;
      }
    } else if (tag == RegimeTag::AlgebraicTails) {
      which = ThetaCase::E4;
    }
  } else {
    if (nearly_equal(n, 2.0)) {
      if (m > 1.0 && m <= 2.0) which = ThetaCase::E3;
    } else {
      which = ThetaCase::E5;
    }
  }
  return {tag, which};
}

std::vector<double> algebraic_exponents(const ModelParams& p, int count) {
  if (count < 1) reject("exponent count must be >= 1");
  const double n = p.n();
  double second;
  double factor;
  if (p.degeneracy() == Degeneracy::Double) {
    factor = (n + p.m() + 2.0) / (2.0 * n);
    second = factor;
  } else {
    factor = (n + 2.0) / (2.0 * n);
    second = (n + 1.0) / (2.0 * n);
  }
  std::vector<double> k;
  k.reserve(static_cast<std::size_t>(count));
  k.push_back(0.0);
  if (count >= 2) k.push_back(second);
  while (static_cast<int>(k.size()) < count) k.push_back(factor * (k.back() + 1.0));
  return k;
}

double SlowMotionScale::operator()(double epsilon) const {
  if (kind_ == Kind::Exponential) return std::exp(-coefficient_ / epsilon);
  return std::pow(epsilon, coefficient_);
}

double theta_a_supremum(const ModelParams& p, double r) {
  if (!(r > 0.0)) reject("r must be > 0");
  switch (classify_regime(p).theta_case) {
    case ThetaCase::E1: return 4.0 * r;
    case ThetaCase::E2: return 2.0 * r;
    case ThetaCase::E3: return std::pow(2.0, (2.0 - p.m()) / 2.0) * r;
    case ThetaCase::E4:
    case ThetaCase::E5: reject("algebraic regimes have no exponential rate A");
    case ThetaCase::None: break;
  }
  reject("no slow-motion scale for this regime");
}

SlowMotionScale theta(const ModelParams& p, double r, std::optional<double> a,
                      std::optional<int> j) {
  if (!(r > 0.0)) reject("r must be > 0");
  const ThetaCase which = classify_regime(p).theta_case;
  if (which == ThetaCase::None) reject("no slow-motion scale for this regime");

  if (which == ThetaCase::E4 || which == ThetaCase::E5) {
    const int index = j.value_or(1);
    if (index < 1) reject("truncation index j must be >= 1");
    const auto k = algebraic_exponents(p, index + 1);
    return {which, SlowMotionScale::Kind::Algebraic, k.back()};
  }

  const double sup = theta_a_supremum(p, r);
  const double rate = a.value_or(kDefaultAFraction * sup);
  if (!(rate > 0.0 && rate < sup)) {
    std::ostringstream os;
    os << "A = " << rate << " outside the admissible interval (0, " << sup << ")";
    reject(os.str());
  }
  const double coefficient = which == ThetaCase::E1 ? rate * std::sqrt(p.n()) : rate;
  return {which, SlowMotionScale::Kind::Exponential, coefficient};
}

}  // namespace degenac
