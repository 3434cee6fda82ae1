#include <cmath>
#include <numbers>
#include <random>

#include "degenac/energy.hpp"
#include "degenac/error.hpp"
#include "degenac/profiles.hpp"
#include "degenac/solver.hpp"
#include "doctest.h"

using namespace degenac;

namespace {

std::size_t cells_for(double a, double b, double h) { return static_cast<std::size_t>(std::lround((b - a) / h)); }

const PiecewiseConstant& six_jumps() {
  static const auto v = make_jump_function(-4, 4, {-3.4, -2, -0.5, 0.8, 2.2, 3.2}, -1);
  return v;
}

SimConfig config(double t_end) {
  SimConfig c;
  c.t_end = t_end;
  return c;
}

template <typename F>
SimConfig with(SimConfig c, F&& edit) {
  edit(c);
  return c;
}

}  // namespace

TEST_CASE("spatial_operator examples") {
  const auto p = make_params(2, 4, 0.1, Degeneracy::Double);
  auto op = spatial_operator(p, Field::sample(-4, 4, 160, [](double) { return 1.0; }));
  for (double x : op.values()) CHECK(x == 0.0);
  const auto p2 = make_params(2, 2, 0.1, Degeneracy::Double);
  op = spatial_operator(p2, Field::sample(-4, 4, 160, [](double) { return 0.0; }));
  for (double x : op.values()) CHECK(x == 0.0);

  const double eps = 0.1;
  const auto wave = Field::sample(-4, 4, cells_for(-4, 4, eps / 100), [&](double x) { return std::tanh(x / (2 * eps)); });
  op = spatial_operator(p, wave);
  double worst = 0.0, fp_scale = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i) {
    worst = std::max(worst, std::fabs(op[i]));
    fp_scale = std::max(fp_scale, std::fabs(potential_prime(p, wave[i])));
  }
  CHECK(worst < 1e-3 * fp_scale);
  CHECK_THROWS_AS(spatial_operator(p, Field::sample(0, 1, 3, [](double) { return 0.0; })), InvalidArgument);
}

TEST_CASE("property: spatial_operator is the weighted gradient of the discrete energy") {
  // u_t = -(eps / w_i) dE/du_i with trapezoid weights w_i = h (h/2 at the ends)
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto [m, n, d] : {std::tuple{2.0, 4.0, Degeneracy::Double}, std::tuple{2.5, 3.5, Degeneracy::Single},
                         std::tuple{1.0, 2.0, Degeneracy::Double}, std::tuple{3.0, 7.0, Degeneracy::Double}}) {
    const auto p = make_params(m, n, 0.2, d);
    const double phase = unit(rng);
    const auto u = Field::sample(-1, 1, 40, [&](double x) { return 0.9 * std::sin(3 * x + phase); });
    const auto op = spatial_operator(p, u);
    const double h = u.step();
    for (std::size_t i = 0; i < u.size(); i += 3) {
      const double delta = 1e-6;
      auto plus = u, minus = u;
      plus[i] += delta;
      minus[i] -= delta;
      const double grad = (energy(p, plus).total - energy(p, minus).total) / (2 * delta);
      const double w = (i == 0 || i == u.cells()) ? h / 2 : h;
      CHECK(op[i] == doctest::Approx(-p.epsilon() / w * grad).epsilon(1e-6));
    }
  }
}

TEST_CASE("property: mirrored ghosts cancel the boundary flux") {
  const auto p = make_params(2, 4, 0.1, Degeneracy::Double);
  const auto u = Field::sample(-1, 1, 50, [](double x) { return 0.3 + 0.5 * std::cos(std::numbers::pi * x); });
  const auto op = spatial_operator(p, u);
  // u is even about both ends, so the mirrored operator at 0 equals the
  // interior formula applied with u_{-1} = u_1
  const double eps = p.epsilon(), h = u.step();
  const double dr = u[1] - u[0];
  const double g = 0.5 * (diffusivity(p, u[0]) + diffusivity(p, u[1]));
  const double expected = eps * eps * (g * dr - g * (-dr)) / (h * h) -
                          eps * eps / 4 * diffusivity_prime(p, u[0]) * 2 * dr * dr / (h * h) -
                          potential_prime(p, u[0]);
  CHECK(op[0] == doctest::Approx(expected).epsilon(1e-12));
  const auto [l, r] = check_neumann(simulate(p, u, config(0.05)).final_field);
  CHECK(std::isfinite(l));
  CHECK(std::isfinite(r));
}

TEST_CASE("stable_dt examples") {
  const auto p = make_params(2, 2, 0.1, Degeneracy::Double);
  // D attains 1 at the node x = 0
  const auto u = Field::sample(-1, 1, 400, [](double x) { return 0.5 * x; });
  CHECK(u.step() == doctest::Approx(0.005).epsilon(1e-14));
  CHECK(stable_dt(p, u, 0.5) == doctest::Approx(6.25e-4).epsilon(1e-12));
  const auto fine = Field::sample(-1, 1, 800, [](double x) { return 0.5 * x; });
  CHECK(stable_dt(p, fine, 0.5) == doctest::Approx(6.25e-4 / 4).epsilon(1e-12));

  // D vanishes everywhere; 1 / |F''(1)| = 1 / 2 governs
  const auto wells = Field::sample(-1, 1, 400, [](double x) { return x < 0 ? -1.0 : 1.0; });
  CHECK(stable_dt(p, wells, 0.5) == doctest::Approx(0.25).epsilon(1e-7));
}

TEST_CASE("step examples") {
  const auto p = make_params(2, 4, 0.1, Degeneracy::Double);
  const auto ones = Field::sample(-4, 4, 160, [](double) { return 1.0; });
  const auto next = step(p, ones, 0.3);
  for (double x : next.values()) CHECK(x == 1.0);

  // -F''(0) = 1 > 0: an odd perturbation of the unstable state grows
  const auto p2 = make_params(2, 2, 0.1, Degeneracy::Double);
  auto u = Field::sample(-4, 4, 400, [](double x) { return 1e-3 * std::sin(std::numbers::pi * x / 8); });
  const double start = std::fabs(u[300]);
  const double dt = stable_dt(p2, u);
  for (int k = 0; k < 200; ++k) u = step(p2, u, dt);
  CHECK(std::fabs(u[300]) > 1.5 * start);

  CHECK_THROWS_AS(step(p, Field::sample(-4, 4, 160, [](double) { return 1e200; }), 1.0), NumericalError);
}

TEST_CASE("compacton drift shrinks with the grid") {
  // 1000 steps of h = eps/20 give a drift near 7e-3, far above the 1e-4 one
  // might hope for: the kinks where the compactons meet +-1 move by O(h).
  // The decay is first order but uneven, since the kink offsets from the
  // nearest node change with h.
  const auto p = make_params(2, 2, 0.1, Degeneracy::Double);
  std::vector<double> drift;
  for (int k : {20, 40, 80}) {
    const auto prof = build_profile(p, six_jumps(), cells_for(-4, 4, 0.1 / k));
    REQUIRE(prof.stationary);
    const auto trace = simulate(p, prof.field, config(0.25));
    drift.push_back(max_abs_difference(trace.final_field, prof.field));
    CHECK(energy_identity_residual(trace) < 1e-6);
  }
  CHECK(drift[1] < drift[0]);
  CHECK(drift[2] < drift[1]);
  CHECK(drift[2] < drift[0] / 3);
}

TEST_CASE("simulate examples") {
  const double eps = 0.1;
  const auto p = make_params(2, 4, eps, Degeneracy::Double);
  const auto two = make_jump_function(-4, 4, {-1.0, 1.0}, -1);
  const auto prof = build_profile(p, two, cells_for(-4, 4, eps / 20));
  const auto trace = simulate(p, prof.field, with(config(10.0), [](SimConfig& c) { c.record_every = 200; }));
  REQUIRE(trace.interface_positions.back().size() == 2);
  for (std::size_t i = 0; i < 2; ++i) CHECK(std::fabs(trace.interface_positions.back()[i] - two.jumps()[i]) < 0.01);
  CHECK(trace.stop_reason == StopReason::TEnd);
  CHECK(trace.times.back() == 10.0);

  const auto one = make_jump_function(-4, 4, {1.0}, -1);
  const auto layer = build_profile(p, one, cells_for(-4, 4, eps / 20));
  const auto t1 = simulate(p, layer.field, with(config(10.0), [](SimConfig& c) { c.record_every = 200; }));
  REQUIRE(t1.interface_positions.back().size() == 1);
  CHECK(std::fabs(t1.interface_positions.back()[0] - 1.0) < 0.01);

  const SimConfig capped = with(config(10.0), [](SimConfig& c) { c.max_steps = 7; });
  CHECK(simulate(p, layer.field, capped).stop_reason == StopReason::MaxSteps);
  CHECK(simulate(p, layer.field, capped).steps == 7);
  const auto stopped = simulate(p, layer.field, with(config(10.0), [](SimConfig& c) { c.record_every = 3; }),
                                [](const SimTrace& tr) { return tr.times.size() == 4; });
  CHECK(stopped.stop_reason == StopReason::Predicate);
  CHECK(stopped.steps == 9);

  CHECK_THROWS_AS(simulate(p, layer.field, config(0.0)), InvalidArgument);
  CHECK_THROWS_AS(simulate(p, layer.field, with(config(1.0), [](SimConfig& c) { c.dt_safety = 1.5; })), InvalidArgument);
  CHECK_THROWS_AS(simulate(p, Field::sample(-4, 4, 160, [](double) { return 1.1; }), config(1.0)), InvalidArgument);
}

TEST_CASE("record_interval records on a time stride") {
  const auto p = make_params(2, 4, 0.1, Degeneracy::Double);
  const auto layer = build_profile(p, make_jump_function(-4, 4, {0.3}, -1), 800);
  const auto trace = simulate(p, layer.field, with(config(1.0), [](SimConfig& c) { c.record_interval = 0.1; }));
  CHECK(trace.times.size() == 11);
  for (std::size_t k = 1; k < trace.times.size(); ++k) {
    CHECK(trace.times[k] > trace.times[k - 1]);
    CHECK(trace.times[k] >= 0.1 * static_cast<double>(k) - 1e-12);
  }
  CHECK(trace.bound_history.size() == trace.times.size());
}

TEST_CASE("energy identity examples") {
  const auto p = make_params(2, 2, 0.1, Degeneracy::Double);
  const auto uniform = Field::sample(-4, 4, 1600, [](double) { return 0.5; });
  const auto rolled = simulate(p, uniform, config(5.0));
  CHECK(energy_identity_residual(rolled) < 5e-3);
  CHECK(rolled.final_field[800] == doctest::Approx(1.0).epsilon(1e-3));

  const auto compacton = build_profile(p, six_jumps(), 1600);
  CHECK(energy_identity_residual(simulate(p, compacton.field, config(1.0))) < 1e-6);

  // a layered run keeps dt diffusion-limited, so halving dt halves the
  // record stride of the forward-difference dissipation quadrature
  const auto tp = make_params(2, 4, 0.1, Degeneracy::Double);
  const auto u0 = Field::sample(-4, 4, 800, [](double x) { return 0.9 * std::tanh(x / 0.2); });
  const double coarse = energy_identity_residual(simulate(tp, u0, with(config(0.5), [](SimConfig& c) { c.dt_safety = 0.5; })));
  const double fine = energy_identity_residual(simulate(tp, u0, with(config(0.5), [](SimConfig& c) { c.dt_safety = 0.25; })));
  CHECK(coarse < 5e-3);
  CHECK(coarse / fine >= 1.5);
  CHECK_THROWS_AS(energy_identity_residual(SimTrace(u0)), InvalidArgument);
}

TEST_CASE("property: energy never rises and the bound surrogate holds") {
  struct Run {
    ModelParams p;
    std::function<double(double)> init;
  };
  const std::vector<Run> runs = {
      {make_params(2, 4, 0.1, Degeneracy::Double), [](double x) { return 0.9 * std::tanh(x / 0.2); }},
      {make_params(2, 2, 0.1, Degeneracy::Double), [](double x) { return 0.8 * std::sin(2 * x); }},
      {make_params(2, 3, 0.1, Degeneracy::Single), [](double x) { return std::tanh(3 * x) * 0.95; }},
      {make_params(1.5, 5.0, 0.1, Degeneracy::Double), [](double x) { return 0.5 * std::cos(x) + 0.4 * std::sin(5 * x); }},
  };
  for (const auto& run : runs) {
    const auto u0 = Field::sample(-4, 4, 800, run.init);
    const auto trace = simulate(run.p, u0, with(config(1.0), [](SimConfig& c) { c.record_every = 1; }));
    for (std::size_t k = 1; k < trace.energies.size(); ++k)
      CHECK(trace.energies[k] <= trace.energies[k - 1] + 1e-10 * trace.energies[0]);
    CHECK(trace.bound_violation <= 1e-6);
    CHECK(trace.max_energy_rise <= 1e-10);
  }
}

TEST_CASE("property: standing-wave drift converges at second order") {
  const double eps = 0.1;
  const auto p = make_params(2, 4, eps, Degeneracy::Double);
  double drift[3];
  int idx = 0;
  for (int k : {10, 20, 40}) {
    const auto u0 = Field::sample(-4, 4, cells_for(-4, 4, eps / k), [&](double x) { return std::tanh(x / (2 * eps)); });
    drift[idx++] = max_abs_difference(simulate(p, u0, config(1.0)).final_field, u0);
  }
  CHECK(std::log2(drift[0] / drift[1]) >= 1.8);
  CHECK(std::log2(drift[1] / drift[2]) >= 1.8);
}
