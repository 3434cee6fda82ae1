#include "degenac/interfaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "degenac/error.hpp"

namespace degenac {

namespace {

double directed(std::span<const double> from, std::span<const double> to) {
  double worst = 0.0;
  std::size_t j = 0;
  for (double x : from) {
    while (j + 1 < to.size() && to[j + 1] <= x) ++j;
    double d = std::fabs(x - to[j]);
    if (j + 1 < to.size()) d = std::min(d, std::fabs(to[j + 1] - x));
    worst = std::max(worst, d);
  }
  return worst;
}

// d(I(t_k), reference), or nullopt when interfaces were lost.
std::optional<double> record_distance(const std::vector<double>& positions, std::span<const double> reference) {
  if (positions.size() < reference.size() || positions.empty()) return std::nullopt;
  return hausdorff(positions, reference);
}

double predict(const LineFit& fit, Verdict kind, double eps) {
  const double x = kind == Verdict::Algebraic ? std::log(1.0 / eps) : 1.0 / eps;
  return std::exp(fit.intercept + fit.slope * x);
}

}  // namespace

double hausdorff(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw InvalidArgument("Hausdorff undefined on empty set");
  return std::max(directed(x, y), directed(y, x));
}

ExitTime exit_time(const SimTrace& trace, std::span<const double> reference, double delta1) {
  if (!(delta1 > 0.0)) throw InvalidArgument("delta1 must be > 0");
  if (reference.empty()) throw InvalidArgument("Hausdorff undefined on empty set");
  if (trace.times.empty()) throw InvalidArgument("trace has no records");

  ExitTime out;
  double previous = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    const auto d = record_distance(trace.interface_positions[k], reference);
    if (!d) {
      out.time = trace.times[k];
      out.censored = false;
      out.annihilated = true;
      return out;
    }
    if (*d > delta1) {
      out.censored = false;
      if (k == 0) {
        out.time = trace.times[0];
        out.record_jump = *d;
      } else {
        const double t0 = trace.times[k - 1];
        const double t1 = trace.times[k];
        const double w = (delta1 - previous) / (*d - previous);
        out.time = t0 + std::clamp(w, 0.0, 1.0) * (t1 - t0);
        out.record_jump = *d - previous;
      }
      return out;
    }
    previous = *d;
  }
  out.time = trace.times.back();
  return out;
}

ExitTime exit_time(const SimTrace& trace, const PiecewiseConstant& v, double delta1) {
  if (!(delta1 > 0.0 && delta1 < max_r(v))) throw InvalidArgument("delta1 must lie in (0, max_r(v))");
  return exit_time(trace, v.jumps(), delta1);
}

StopPredicate exit_predicate(std::vector<double> reference, double delta1) {
  return [reference = std::move(reference), delta1](const SimTrace& trace) {
    const auto d = record_distance(trace.interface_positions.back(), reference);
    return !d || *d > delta1;
  };
}

ExitRun measure_exit_time(const ModelParams& p, const Field& initial, const ExitRunOptions& options) {
  if (!(options.t_max > 0.0)) throw InvalidArgument("t_max must be > 0");
  if (options.records == 0) throw InvalidArgument("records must be >= 1");
  const std::vector<double> reference = interface_set(initial, options.probe).positions;
  if (reference.empty()) throw InvalidArgument("initial data has no interfaces");

  SimConfig config;
  config.t_end = options.t_max;
  config.dt_safety = options.dt_safety;
  config.record_interval = options.t_max / static_cast<double>(options.records);
  config.max_steps = options.max_steps;
  config.probe = options.probe;

  ExitRun run;
  for (;;) {
    const SimTrace trace = simulate(p, initial, config, exit_predicate(reference, options.delta1));
    run.exit = exit_time(trace, reference, options.delta1);
    run.steps = trace.steps;
    run.stop_reason = trace.stop_reason;
    run.record_interval = config.record_interval;
    const bool coarse = !run.exit.censored && !run.exit.annihilated && run.exit.record_jump > 2.0 * options.delta1;
    if (!coarse || run.refinements == options.max_refinements) return run;
    config.record_interval /= 8.0;
    ++run.refinements;
  }
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Exponential: return "Exponential";
    case Verdict::Algebraic: return "Algebraic";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

TimescaleFit fit_timescale(std::span<const TimescalePoint> points, const std::vector<bool>& censored) {
  if (points.size() != censored.size()) throw InvalidArgument("censored mask size must match the points");
  TimescaleFit out;
  out.points.assign(points.begin(), points.end());
  out.censored = censored;

  std::vector<double> inv, log_inv, log_t;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& pt = points[i];
    if (!(pt.epsilon > 0.0 && std::isfinite(pt.epsilon))) throw InvalidArgument("epsilon must be > 0");
    if (!(pt.time > 0.0 && std::isfinite(pt.time))) throw InvalidArgument("time must be > 0");
    if (censored[i]) continue;
    inv.push_back(1.0 / pt.epsilon);
    log_inv.push_back(std::log(1.0 / pt.epsilon));
    log_t.push_back(std::log(pt.time));
  }

  const bool fitted = inv.size() >= 3;
  if (!fitted) {
    std::ostringstream os;
    os << "only " << inv.size() << " uncensored points; need 3";
    out.diagnostics.push_back(os.str());
  } else {
    out.exp_fit = fit_line(inv, log_t);
    out.alg_fit = fit_line(log_inv, log_t);
    const auto wins = [](const LineFit& a, const LineFit& b) {
      if (!(a.slope > 0.0)) return false;
      if (a.r_squared - b.r_squared > 0.05) return true;
      return a.r_squared >= 0.9 && b.sse >= 4.0 * a.sse;
    };
    if (wins(out.exp_fit, out.alg_fit)) {
      out.verdict = Verdict::Exponential;
    } else if (wins(out.alg_fit, out.exp_fit)) {
      out.verdict = Verdict::Algebraic;
    } else {
      out.diagnostics.push_back("neither regression is preferred");
    }
  }

  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!censored[i]) continue;
    CensoredBound bound{points[i].epsilon, points[i].time, std::nullopt, false};
    if (fitted) {
      const Verdict kind = out.verdict == Verdict::Algebraic ? Verdict::Algebraic : Verdict::Exponential;
      const LineFit& fit = kind == Verdict::Algebraic ? out.alg_fit : out.exp_fit;
      bound.predicted = predict(fit, kind, points[i].epsilon);
      bound.consistent = *bound.predicted >= bound.lower_bound;
    }
    out.bounds.push_back(bound);
  }
  return out;
}

}  // namespace degenac
