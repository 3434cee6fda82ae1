#include "degenac/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "degenac/error.hpp"
#include "degenac/kernels.hpp"

namespace degenac {

namespace {

constexpr std::size_t kDtRefresh = 100;
constexpr double kReactionDelta = 1e-4;

double reaction_scale(const ModelParams& p, std::span<const double> u) {
  double worst = 0.0;
  for (double x : u) {
    const double slope =
        (potential_prime(p, x + kReactionDelta) - potential_prime(p, x - kReactionDelta)) /
        (2.0 * kReactionDelta);
    worst = std::max(worst, std::fabs(slope));
  }
  return worst;
}

double dt_bound(const ModelParams& p, double h, double max_d, double reaction, double safety) {
  const double inf = std::numeric_limits<double>::infinity();
  const double eps = p.epsilon();
  const double diffusion = max_d > 0.0 ? h * h / (2.0 * eps * eps * max_d) : inf;
  const double react = reaction > 0.0 ? 1.0 / reaction : inf;
  return safety * std::min(diffusion, react);
}

// Owns the work arrays of one run.
class Integrator {
 public:
  Integrator(const ModelParams& p, const Field& u)
      : kernels_(kernels::active()),
        model_(kernels::NodalModel::from(p)),
        eps_(p.epsilon()),
        h_(u.step()),
        c_(eps_ * eps_ / (h_ * h_)),
        u_(u.values().begin(), u.values().end()) {
    const std::size_t n = u_.size();
    for (auto* v : {&k1_, &k2_, &k3_, &k4_, &stage_, &next_, &d_, &dp_, &fp_, &f_}) v->resize(n);
  }

  std::vector<double>& state() { return u_; }
  const std::vector<double>& diffusivity() const { return d_; }

  /// Energy of the current state (also refreshes d_).
  double energy() {
    kernels_.nodal(model_, u_.data(), u_.size(), d_.data(), dp_.data(), fp_.data(), f_.data());
    return kernels_.energy(u_.data(), d_.data(), f_.data(), u_.size(), h_, eps_);
  }

  void rhs(const double* in, double* out) {
    kernels_.nodal(model_, in, u_.size(), d_.data(), dp_.data(), fp_.data(), nullptr);
    kernels_.stencil(in, d_.data(), dp_.data(), fp_.data(), u_.size(), c_, out);
  }

  /// Advances u by dt; returns the energy of the state before the step and
  /// max |u| after it.
  std::pair<double, double> rk4(double dt) {
    const std::size_t n = u_.size();
    kernels_.nodal(model_, u_.data(), n, d_.data(), dp_.data(), fp_.data(), f_.data());
    const double before = kernels_.energy(u_.data(), d_.data(), f_.data(), n, h_, eps_);
    kernels_.stencil(u_.data(), d_.data(), dp_.data(), fp_.data(), n, c_, k1_.data());
    kernels_.axpy(u_.data(), k1_.data(), 0.5 * dt, n, stage_.data());
    rhs(stage_.data(), k2_.data());
    kernels_.axpy(u_.data(), k2_.data(), 0.5 * dt, n, stage_.data());
    rhs(stage_.data(), k3_.data());
    kernels_.axpy(u_.data(), k3_.data(), dt, n, stage_.data());
    rhs(stage_.data(), k4_.data());
    const double peak =
        kernels_.rk4_finish(u_.data(), k1_.data(), k2_.data(), k3_.data(), k4_.data(), dt, n, next_.data());
    u_.swap(next_);
    return {before, peak};
  }

 private:
  const kernels::Table& kernels_;
  kernels::NodalModel model_;
  double eps_;
  double h_;
  double c_;
  std::vector<double> u_;
  std::vector<double> k1_, k2_, k3_, k4_, stage_, next_, d_, dp_, fp_, f_;
};

void require_cells(const Field& u) {
  if (u.cells() < 4) throw InvalidArgument("solver needs at least 4 cells");
}

double weighted_square_distance(std::span<const double> a, std::span<const double> b, double h) {
  double sum = 0.0;
  const std::size_t last = a.size() - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    const double w = (i == 0 || i == last) ? 0.5 : 1.0;
    const double diff = a[i] - b[i];
    sum += w * diff * diff;
  }
  return sum * h;
}

}  // namespace

const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::TEnd: return "t_end";
    case StopReason::MaxSteps: return "max_steps";
    case StopReason::Predicate: return "predicate";
  }
  return "?";
}

Field spatial_operator(const ModelParams& p, const Field& u) {
  require_cells(u);
  const std::size_t n = u.size();
  std::vector<double> d(n), dp(n), fp(n), out(n);
  const auto& k = kernels::active();
  const auto model = kernels::NodalModel::from(p);
  k.nodal(model, u.values().data(), n, d.data(), dp.data(), fp.data(), nullptr);
  const double h = u.step();
  k.stencil(u.values().data(), d.data(), dp.data(), fp.data(), n, p.epsilon() * p.epsilon() / (h * h),
            out.data());
  return u.with_values(std::move(out));
}

double stable_dt(const ModelParams& p, const Field& u, double safety) {
  if (!(safety > 0.0 && safety <= 1.0)) throw InvalidArgument("dt_safety must lie in (0, 1]");
  double max_d = 0.0;
  for (double x : u.values()) max_d = std::max(max_d, diffusivity(p, x));
  return dt_bound(p, u.step(), max_d, reaction_scale(p, u.values()), safety);
}

Field step(const ModelParams& p, const Field& u, double dt) {
  require_cells(u);
  if (!(dt > 0.0)) throw InvalidArgument("time step must be > 0");
  Integrator integrator(p, u);
  const double peak = integrator.rk4(dt).second;
  if (!std::isfinite(peak)) throw NumericalError("non-finite values after step 1");
  return u.with_values(std::move(integrator.state()));
}

SimTrace simulate(const ModelParams& p, const Field& initial, const SimConfig& config,
                  const StopPredicate& stop_predicate) {
  require_cells(initial);
  if (!(config.t_end > 0.0)) throw InvalidArgument("t_end must be > 0");
  if (!(config.dt_safety > 0.0 && config.dt_safety <= 1.0)) throw InvalidArgument("dt_safety must lie in (0, 1]");
  if (config.record_interval <= 0.0 && config.record_every == 0) throw InvalidArgument("record_every must be >= 1");
  for (double x : initial.values()) {
    if (std::fabs(x) > 1.0 + config.bound_tolerance) {
      throw InvalidArgument("initial data leaves [-1 - tol, 1 + tol]");
    }
  }

  SimTrace trace(initial);
  Integrator integrator(p, initial);
  const double eps = p.epsilon();
  const double h = initial.step();

  std::vector<double> last_record(initial.values().begin(), initial.values().end());
  double last_record_time = 0.0;
  std::size_t record_count = 0;

  auto record = [&](double t, double e) {
    const auto& u = integrator.state();
    if (record_count > 0) {
      const double dt = t - last_record_time;
      trace.dissipation.push_back(trace.dissipation.back() +
                                  weighted_square_distance(u, last_record, h) / (dt * eps));
    } else {
      trace.dissipation.push_back(0.0);
    }
    trace.times.push_back(t);
    trace.energies.push_back(e);
    trace.bound_history.push_back(trace.bound_violation);
    const Field now = initial.with_values(u);
    trace.interface_positions.push_back(interface_set(now, config.probe).positions);
    if (record_count == 0 || (config.snapshot_every > 0 && record_count % config.snapshot_every == 0)) {
      trace.snapshot_times.push_back(t);
      trace.snapshots.push_back(now);
    }
    std::copy(u.begin(), u.end(), last_record.begin());
    last_record_time = t;
    ++record_count;
  };

  for (double x : initial.values()) trace.bound_violation = std::max(trace.bound_violation, std::fabs(x) - 1.0);
  const double e0 = integrator.energy();
  record(0.0, e0);

  double t = 0.0;
  double dt = 0.0;
  double previous_energy = e0;
  double next_record_time = config.record_interval;
  bool recorded_last_step = true;
  std::size_t steps = 0;
  trace.stop_reason = StopReason::TEnd;

  while (t < config.t_end) {
    if (steps == config.max_steps) {
      trace.stop_reason = StopReason::MaxSteps;
      break;
    }
    if (steps % kDtRefresh == 0) {
      integrator.energy();  // refreshes the nodal diffusivity
      const auto& d = integrator.diffusivity();
      const double max_d = *std::max_element(d.begin(), d.end());
      dt = dt_bound(p, h, max_d, reaction_scale(p, integrator.state()), config.dt_safety);
      if (!std::isfinite(dt)) dt = config.t_end;
    }
    const double this_dt = std::min(dt, config.t_end - t);
    const auto [energy_before, peak] = integrator.rk4(this_dt);
    ++steps;
    if (!std::isfinite(peak)) {
      std::ostringstream os;
      os << "non-finite values at step " << steps << " (t = " << t << ")";
      throw NumericalError(os.str(), t);
    }
    // energy_before belongs to the state the step started from.
    const double rise = energy_before - previous_energy;
    if (steps > 1 && e0 > 0.0) {
      trace.max_energy_rise = std::max(trace.max_energy_rise, rise / e0);
      if (rise > config.energy_rise_tolerance * e0 + 64.0 * 2.220446049250313e-16 * energy_before) {
        std::ostringstream os;
        os << "energy rose by " << rise << " in one step at step " << steps << " (t = " << t << ")";
        throw NumericalError(os.str(), t);
      }
    }
    previous_energy = energy_before;
    t = (config.t_end - t <= dt) ? config.t_end : t + this_dt;
    trace.bound_violation = std::max(trace.bound_violation, peak - 1.0);

    bool due;
    if (config.record_interval > 0.0) {
      due = t >= next_record_time;
      while (next_record_time <= t) next_record_time += config.record_interval;
    } else {
      due = steps % config.record_every == 0;
    }
    recorded_last_step = false;
    if (due || t >= config.t_end) {
      record(t, integrator.energy());
      recorded_last_step = true;
      if (stop_predicate && stop_predicate(trace)) {
        trace.stop_reason = StopReason::Predicate;
        break;
      }
    }
  }
  if (!recorded_last_step) record(t, integrator.energy());

  trace.steps = steps;
  trace.final_field = initial.with_values(integrator.state());
  if (trace.snapshot_times.back() != trace.times.back()) {
    trace.snapshot_times.push_back(trace.times.back());
    trace.snapshots.push_back(trace.final_field);
  }
  if (trace.bound_violation > config.bound_tolerance) {
    std::ostringstream os;
    os << "max (|u| - 1)_+ = " << trace.bound_violation << " exceeds bound_tolerance " << config.bound_tolerance;
    trace.warnings.push_back(os.str());
  }
  return trace;
}

double energy_identity_residual(const SimTrace& trace) {
  if (trace.energies.size() < 2) throw InvalidArgument("energy identity needs at least 2 records");
  const double e0 = trace.energies.front();
  const double lhs = e0 - trace.energies.back();
  return std::fabs(lhs - trace.dissipation.back()) / std::max(e0, 1e-30);
}

}  // namespace degenac
