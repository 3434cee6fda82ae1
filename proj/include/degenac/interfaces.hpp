#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "degenac/field.hpp"
#include "degenac/interface_set.hpp"
#include "degenac/jump_function.hpp"
#include "degenac/model.hpp"
#include "degenac/regression.hpp"
#include "degenac/solver.hpp"

namespace degenac {

/// max(sup_x d(x, Y), sup_y d(y, X)) for sorted X, Y. Throws InvalidArgument
/// "Hausdorff undefined on empty set" if either is empty.
double hausdorff(std::span<const double> x, std::span<const double> y);

struct ExitTime {
  /// Exit time, or the last recorded time when censored.
  double time = 0.0;
  bool censored = true;
  /// The interface count dropped below the reference count first.
  bool annihilated = false;
  /// Increase of d(I(t), I(0)) across the record interval containing the
  /// exit; large values mean the record stride was too coarse.
  double record_jump = 0.0;
};

/// First time d(I_K[u(t)], reference) exceeds delta1, linearly interpolated
/// between records. An empty interface set or fewer interfaces than the
/// reference counts as annihilation, reported at that record. Throws
/// InvalidArgument for delta1 <= 0 or an empty reference.
ExitTime exit_time(const SimTrace& trace, std::span<const double> reference, double delta1);

/// Same with the jumps of v as reference; delta1 must lie in (0, max_r(v)).
ExitTime exit_time(const SimTrace& trace, const PiecewiseConstant& v, double delta1);

/// Fires once the latest record has left the delta1-neighbourhood of
/// reference or lost interfaces.
StopPredicate exit_predicate(std::vector<double> reference, double delta1);

struct ExitRun {
  ExitTime exit;
  std::size_t steps = 0;
  /// Record stride of the accepted run.
  double record_interval = 0.0;
  /// Number of reruns with a finer stride.
  int refinements = 0;
  StopReason stop_reason = StopReason::TEnd;
};

struct ExitRunOptions {
  double delta1 = 0.1;
  double t_max = 1.0;
  /// Initial time stride between records is t_max / records.
  std::size_t records = 20000;
  /// Reruns with stride / 8 while the exceedance jumps more than 2 delta1
  /// between records, at most this often.
  int max_refinements = 3;
  double dt_safety = 0.5;
  /// Step budget per run; a run that exhausts it is censored early.
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  ProbeSet probe;
};

/// Simulates from initial until the interfaces leave the delta1
/// neighbourhood of I_K[initial] or t_max is reached.
ExitRun measure_exit_time(const ModelParams& p, const Field& initial, const ExitRunOptions& options);

enum class Verdict { Exponential, Algebraic, Inconclusive };

const char* to_string(Verdict v);

struct TimescalePoint {
  double epsilon;
  double time;
};

struct CensoredBound {
  double epsilon;
  /// T exceeds this.
  double lower_bound;
  /// Prediction of the preferred fit (or the exponential fit when
  /// inconclusive); nullopt without a fit.
  std::optional<double> predicted;
  /// predicted >= lower_bound.
  bool consistent = false;
};

struct TimescaleFit {
  std::vector<TimescalePoint> points;
  std::vector<bool> censored;
  /// ln T against 1/eps.
  LineFit exp_fit;
  /// ln T against ln(1/eps).
  LineFit alg_fit;
  Verdict verdict = Verdict::Inconclusive;
  std::vector<CensoredBound> bounds;
  std::vector<std::string> diagnostics;
};

/// Regressions over the uncensored points. One model wins if its R^2 leads
/// by more than 0.05, or if its R^2 is at least 0.9 and the other model's
/// residual sum of squares is at least 4 times larger; the winner also needs
/// a positive slope. Fewer than 3 uncensored points give Inconclusive with a
/// diagnostic. Throws InvalidArgument for mismatched sizes or non-positive
/// eps or T.
TimescaleFit fit_timescale(std::span<const TimescalePoint> points, const std::vector<bool>& censored);

}  // namespace degenac
