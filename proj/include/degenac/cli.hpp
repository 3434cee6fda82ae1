#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "degenac/field.hpp"
#include "degenac/interface_set.hpp"
#include "degenac/model.hpp"
#include "degenac/solver.hpp"

namespace degenac::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitCensoredOnly = 4;
/// simulate only: stopped by the exit predicate or by max_steps.
inline constexpr int kExitPredicateStop = 5;
inline constexpr int kExitMaxSteps = 6;

struct RunConfig {
  explicit RunConfig(ModelParams p) : model(p) {}

  ModelParams model;
  double a = -4.0;
  double b = 4.0;
  /// Grid cells for model.epsilon(); sweeps rescale with cells_for().
  std::size_t cells = 0;
  /// True when "cells" was given explicitly (sweeps then keep it fixed).
  bool fixed_cells = false;
  SimConfig sim;
  std::vector<double> jumps;
  int first_value = -1;
  double delta1 = 0.1;
  std::vector<double> eps_list;
  /// t_max = t_max_exp_factor * exp(1 / eps) when set, else t_max.
  std::optional<double> t_max;
  std::optional<double> t_max_exp_factor;
  std::optional<double> theta_a;
  std::string output_dir = ".";
  /// FNV-1a of the canonical JSON text.
  std::uint64_t hash = 0;

  std::size_t cells_for(double epsilon) const;
};

/// Parses a JSON object. Unknown keys are rejected; errors name the field.
/// Defaults: domain [-4, 4], cells (b - a) / (eps / 20), dt_safety 0.5,
/// K = {0}, degeneracy "double". Required: m, n, epsilon.
RunConfig parse_config(const std::string& json_text);

/// Inline JSON when the argument starts with '{', otherwise a file path.
RunConfig load_config(const std::string& path_or_json);

std::string hash_hex(std::uint64_t hash);

/// 17 significant digits.
std::string format_real(double x);

/// "# degenac subcommand=<name> config=<hash>" followed by the header row.
void write_csv_header(std::ostream& os, const std::string& subcommand, std::uint64_t hash,
                      const std::vector<std::string>& columns);

/// Reads x,u columns written by `profile` or `simulate`. Throws
/// InvalidArgument for malformed rows or a non-uniform grid.
Field read_field_csv(const std::string& path);

void write_field_csv(const std::string& path, const Field& u, const std::string& subcommand,
                     std::uint64_t hash);

/// Line chart with one polyline or marker set per series.
struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series);

struct WaveRequest {
  double a = -4.0;
  double b = 4.0;
  std::size_t points = 801;
  std::string out = "wave.csv";
  bool plot = false;
};

struct ProfileRequest {
  std::string out = "profile.csv";
  bool plot = false;
};

struct EnergyRequest {
  std::string init;
};

struct SimulateRequest {
  /// Field CSV; the profile of the configured jumps when empty.
  std::string init;
  std::string out_dir = "trace";
  /// Stop once interfaces move more than config delta1.
  bool stop_on_exit = false;
  bool plot = false;
};

struct SweepRequest {
  std::string out = "sweep.csv";
  unsigned jobs = 1;
  bool plot = false;
};

/// Each returns an exit code and writes its artifacts; summaries go to out.
int run_gamma(const RunConfig& config, std::ostream& out);
int run_wave(const RunConfig& config, const WaveRequest& request, std::ostream& out);
int run_profile(const RunConfig& config, const ProfileRequest& request, std::ostream& out);
int run_energy(const RunConfig& config, const EnergyRequest& request, std::ostream& out);
int run_simulate(const RunConfig& config, const SimulateRequest& request, std::ostream& out);
int run_sweep(const RunConfig& config, const SweepRequest& request, std::ostream& out);

/// Aggregates every sweep and trace JSON below dir into one JSON document.
int run_report(const std::string& dir, std::ostream& out);

/// --jobs, overridden by DEGENAC_JOBS when set; at least 1.
unsigned resolve_jobs(unsigned flag);

/// Parses "T" or "C*exp(1/eps)" into config.t_max / t_max_exp_factor.
void set_t_max(RunConfig& config, const std::string& text);

}  // namespace degenac::cli
