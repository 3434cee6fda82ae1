#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "degenac/field.hpp"
#include "degenac/interface_set.hpp"
#include "degenac/model.hpp"

namespace degenac {

struct SimConfig {
  double t_end = 1.0;
  double dt_safety = 0.5;
  /// Record every this many steps. Ignored when record_interval > 0.
  std::size_t record_every = 10;
  /// Record at the first step reaching each multiple of this time stride.
  double record_interval = 0.0;
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  /// (|u| - 1)_+ above this is reported as a warning.
  double bound_tolerance = 1e-8;
  /// A one-step energy rise above this fraction of E(0) aborts the run.
  double energy_rise_tolerance = 1e-8;
  /// Keep a snapshot every this many records; 0 keeps only the first and last.
  std::size_t snapshot_every = 0;
  ProbeSet probe;
};

enum class StopReason { TEnd, MaxSteps, Predicate };

const char* to_string(StopReason r);

struct SimTrace {
  std::vector<double> times;
  std::vector<double> energies;
  /// eps^{-1} sum_k dt_k ||(u_{k+1} - u_k) / dt_k||^2 over consecutive
  /// records, trapezoid-weighted; dissipation[0] = 0.
  std::vector<double> dissipation;
  std::vector<std::vector<double>> interface_positions;
  std::vector<double> snapshot_times;
  std::vector<Field> snapshots;
  /// max over the run of (|u| - 1)_+
  double bound_violation = 0.0;
  /// Running value of bound_violation at each record.
  std::vector<double> bound_history;
  /// Largest one-step energy increase relative to E(0).
  double max_energy_rise = 0.0;
  std::size_t steps = 0;
  StopReason stop_reason = StopReason::TEnd;
  std::vector<std::string> warnings;
  Field final_field;

  explicit SimTrace(Field initial) : final_field(std::move(initial)) {}
};

using StopPredicate = std::function<bool(const SimTrace&)>;

/// Right-hand side of u_t = eps^2 (D u_x)_x - (eps^2/2) D'(u) u_x^2 - F'(u)
/// with mirrored ghosts. The D' term averages the two one-sided squared
/// differences so that the semi-discrete system is the exact weighted L2
/// gradient flow of the discrete energy in energy(). Requires M >= 4 cells.
Field spatial_operator(const ModelParams& p, const Field& u);

/// safety * min(h^2 / (2 eps^2 max D), 1 / max |F''|), the reaction scale
/// from centered differences of F' (step 1e-4) at the node values. Either
/// bound is +inf when its scale vanishes.
double stable_dt(const ModelParams& p, const Field& u, double safety = 0.5);

/// One classical RK4 step. Throws NumericalError on non-finite values.
Field step(const ModelParams& p, const Field& u, double dt);

/// Integrates to t_end with dt = stable_dt refreshed every 100 steps, the last
/// step shortened to land on t_end. stop_predicate runs after every record.
/// Throws InvalidArgument for a bad config or initial data outside
/// [-1 - tol, 1 + tol], NumericalError on blow-up or an energy rise beyond
/// energy_rise_tolerance * E(0).
SimTrace simulate(const ModelParams& p, const Field& initial, const SimConfig& config,
                  const StopPredicate& stop_predicate = {});

/// |E(0) - E(T) - dissipation(T)| / max(E(0), 1e-30).
double energy_identity_residual(const SimTrace& trace);

}  // namespace degenac
