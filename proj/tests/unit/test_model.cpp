#include <cmath>
#include <random>

#include "degenac/error.hpp"
#include "degenac/model.hpp"
#include "doctest.h"

using namespace degenac;

namespace {

// Catalog written out independently of classify_regime.
ThetaCase expected_case(double m, double n, Degeneracy d) {
  const bool dbl = d == Degeneracy::Double;
  const bool crit = std::fabs(n - (m + 2.0)) <= 1e-12 * (m + 2.0);
  if (dbl && crit && m > 2.0) return ThetaCase::E1;
  if (dbl && crit && m > 1.0 && m <= 2.0) return ThetaCase::E2;
  if (!dbl && n == 2.0 && m > 1.0 && m <= 2.0) return ThetaCase::E3;
  if (dbl && n > m + 2.0 && !crit) return ThetaCase::E4;
  if (!dbl && n > 2.0) return ThetaCase::E5;
  return ThetaCase::None;
}

}  // namespace

TEST_CASE("make_params validates its bounds") {
  CHECK_NOTHROW(make_params(2, 4, 0.1, Degeneracy::Double));
  CHECK_THROWS_WITH_AS(make_params(2, 1, 0.1, Degeneracy::Double), doctest::Contains("n below 2"), InvalidArgument);
  CHECK_THROWS_AS(make_params(2, 4, 0.0, Degeneracy::Double), InvalidArgument);
  CHECK_THROWS_AS(make_params(-0.5, 4, 0.1, Degeneracy::Double), InvalidArgument);
  CHECK_THROWS_AS(make_params(NAN, 4, 0.1, Degeneracy::Double), InvalidArgument);
  CHECK_THROWS_AS(make_params(2, INFINITY, 0.1, Degeneracy::Double), InvalidArgument);
  CHECK(make_params(1, 2, 0.1, Degeneracy::Double).outside_hypotheses());
  CHECK_FALSE(make_params(1.5, 2, 0.1, Degeneracy::Double).outside_hypotheses());
}

TEST_CASE("diffusivity examples") {
  const auto d = make_params(2, 4, 0.1, Degeneracy::Double);
  const auto s = make_params(2, 2, 0.1, Degeneracy::Single);
  CHECK(diffusivity(d, 0.0) == 1.0);
  CHECK(diffusivity(d, 1.0) == 0.0);
  CHECK(diffusivity(d, -1.0) == 0.0);
  CHECK(diffusivity(s, -1.0) == 4.0);
  CHECK(diffusivity(s, 1.0) == 0.0);
  const auto s3 = make_params(3.5, 4, 0.1, Degeneracy::Single);
  CHECK(diffusivity(s3, -1.0) == doctest::Approx(std::pow(2.0, 3.5)).epsilon(1e-15));
}

TEST_CASE("potential examples") {
  const auto p2 = make_params(2, 2, 0.1, Degeneracy::Double);
  const auto p4 = make_params(2, 4, 0.1, Degeneracy::Double);
  CHECK(potential(p2, 0.0) == 0.25);
  CHECK(potential(p4, 1.0) == 0.0);
  CHECK(potential(p4, -1.0) == 0.0);
  CHECK(potential_prime(p4, 1.0) == 0.0);
  CHECK(potential_prime(p4, -1.0) == 0.0);
  CHECK(potential(p2, 0.5) == doctest::Approx(9.0 / 64.0).epsilon(1e-15));
}

TEST_CASE("classify_regime examples") {
  auto r = classify_regime(make_params(2, 4, 0.1, Degeneracy::Double));
  CHECK(r.tag == RegimeTag::ExponentialTails);
  CHECK(r.theta_case == ThetaCase::E2);
  r = classify_regime(make_params(2, 2, 0.1, Degeneracy::Double));
  CHECK(r.tag == RegimeTag::TouchingWave);
  r = classify_regime(make_params(3, 5, 0.1, Degeneracy::Double));
  CHECK(r.tag == RegimeTag::ExponentialTails);
  CHECK(r.theta_case == ThetaCase::E1);
  r = classify_regime(make_params(2, 6, 0.1, Degeneracy::Double));
  CHECK(r.tag == RegimeTag::AlgebraicTails);
  CHECK(r.theta_case == ThetaCase::E4);
  r = classify_regime(make_params(2, 3, 0.1, Degeneracy::Single));
  CHECK(r.tag == RegimeTag::TouchingWave);
  CHECK(r.theta_case == ThetaCase::E5);
  r = classify_regime(make_params(1.5, 2, 0.1, Degeneracy::Single));
  CHECK(r.theta_case == ThetaCase::E3);
}

TEST_CASE("theta examples") {
  const auto e2 = make_params(2, 4, 0.1, Degeneracy::Double);
  CHECK(theta(e2, 0.5, 0.8)(0.1) == doctest::Approx(std::exp(-8.0)).epsilon(1e-14));
  CHECK(std::exp(-8.0) == doctest::Approx(3.3546e-4).epsilon(1e-4));
  // default A = 0.9 * 2r
  CHECK(theta(e2, 0.5)(0.1) == doctest::Approx(std::exp(-0.9 / 0.1)).epsilon(1e-14));

  const auto e4 = make_params(2, 6, 0.1, Degeneracy::Double);
  const auto t = theta(e4, 1.0, std::nullopt, 2);
  CHECK(t.kind() == SlowMotionScale::Kind::Algebraic);
  CHECK(t.coefficient() == doctest::Approx(55.0 / 36.0).epsilon(1e-14));
  CHECK(t(0.1) == doctest::Approx(std::pow(0.1, 55.0 / 36.0)).epsilon(1e-13));

  const auto e1 = make_params(3, 5, 0.1, Degeneracy::Double);
  CHECK(theta(e1, 0.5)(0.1) == doctest::Approx(std::exp(-0.9 * 2.0 * std::sqrt(5.0) / 0.1)).epsilon(1e-13));
  const auto e3 = make_params(1.5, 2, 0.1, Degeneracy::Single);
  CHECK(theta_a_supremum(e3, 1.0) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));

  CHECK_THROWS_WITH_AS(theta(make_params(2, 2, 0.1, Degeneracy::Double), 0.5),
                       doctest::Contains("no slow-motion scale"), InvalidArgument);
  CHECK_THROWS_AS(theta(e2, 0.5, 1.0), InvalidArgument);  // A must stay below 2r
  CHECK_THROWS_AS(theta(e2, -1.0), InvalidArgument);
}

TEST_CASE("algebraic exponents follow the recurrences") {
  const auto d = algebraic_exponents(make_params(2, 6, 0.1, Degeneracy::Double), 4);
  REQUIRE(d.size() == 4);
  CHECK(d[0] == 0.0);
  CHECK(d[1] == doctest::Approx(5.0 / 6.0));
  CHECK(d[2] == doctest::Approx(55.0 / 36.0));
  CHECK(d[3] == doctest::Approx(455.0 / 216.0));
  const auto s = algebraic_exponents(make_params(2, 6, 0.1, Degeneracy::Single), 3);
  CHECK(s[1] == doctest::Approx(7.0 / 12.0));
  CHECK(s[2] == doctest::Approx((8.0 / 12.0) * (7.0 / 12.0 + 1.0)));
}

TEST_CASE("property: D vanishes exactly at its wells") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> m_dist(0.0, 6.0);
  for (int k = 0; k < 200; ++k) {
    const double m = m_dist(rng);
    const auto d = make_params(m, 4, 0.1, Degeneracy::Double);
    const auto s = make_params(m, 4, 0.1, Degeneracy::Single);
    if (m > 0.0) {
      CHECK(diffusivity(d, 1.0) == 0.0);
      CHECK(diffusivity(d, -1.0) == 0.0);
      CHECK(diffusivity(s, 1.0) == 0.0);
    }
    CHECK(diffusivity(s, -1.0) == doctest::Approx(std::pow(2.0, m)).epsilon(1e-14));
  }
}

TEST_CASE("property: evenness in the double case") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u_dist(-2.0, 2.0);
  const auto p = make_params(2.7, 5.3, 0.1, Degeneracy::Double);
  for (int k = 0; k < 1000; ++k) {
    const double u = u_dist(rng);
    CHECK(diffusivity(p, u) == diffusivity(p, -u));
    CHECK(potential(p, u) == potential(p, -u));
  }
}

TEST_CASE("property: derivatives match centered differences") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u_dist(-0.999, 0.999);
  std::uniform_real_distribution<double> e_dist(0.0, 6.0);
  constexpr double h = 1e-5;
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const double u = u_dist(rng);
    const double m = 1.0 + e_dist(rng);
    const double n = 2.0 + e_dist(rng);
    const auto p = make_params(m, n, 0.1, k % 2 ? Degeneracy::Single : Degeneracy::Double);
    const double fd_d = (diffusivity(p, u + h) - diffusivity(p, u - h)) / (2 * h);
    const double fd_f = (potential(p, u + h) - potential(p, u - h)) / (2 * h);
    const double dp = diffusivity_prime(p, u);
    const double fp = potential_prime(p, u);
    // near-zero derivatives only admit an absolute comparison
    CHECK(std::fabs(dp - fd_d) <= 1e-6 * std::max(std::fabs(dp), 1e-3));
    CHECK(std::fabs(fp - fd_f) <= 1e-6 * std::max(std::fabs(fp), 1e-3));
    ++checked;
  }
  CHECK(checked == 1000);
}

TEST_CASE("property: regime is independent of epsilon and matches the catalog") {
  std::mt19937_64 rng(14);
  std::uniform_int_distribution<int> half(0, 16);
  std::uniform_real_distribution<double> e_dist(1e-3, 2.0);
  for (int k = 0; k < 500; ++k) {
    // half-integer exponents hit the boundary cases n = m + 2 and n = 2
    const double m = 0.5 * half(rng);
    const double n = 2.0 + 0.5 * half(rng);
    const auto d = k % 2 ? Degeneracy::Single : Degeneracy::Double;
    const auto p = make_params(m, n, e_dist(rng), d);
    const auto q = p.with_epsilon(e_dist(rng));
    const auto rp = classify_regime(p);
    const auto rq = classify_regime(q);
    CHECK(rp.tag == rq.tag);
    CHECK(rp.theta_case == rq.theta_case);
    CHECK(rp.theta_case == expected_case(m, n, d));
    const RegimeTag tag = n < m + 2 ? RegimeTag::TouchingWave
                          : n == m + 2 ? RegimeTag::ExponentialTails
                                       : RegimeTag::AlgebraicTails;
    CHECK(rp.tag == tag);
  }
}
