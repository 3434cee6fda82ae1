#include "degenac/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include "degenac/energy.hpp"
#include "degenac/error.hpp"
#include "degenac/interfaces.hpp"
#include "degenac/jump_function.hpp"
#include "degenac/profiles.hpp"
#include "degenac/quadrature.hpp"
#include "degenac/waves.hpp"
#include "json.hpp"

namespace degenac::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kGridRatio = 20.0;

const std::set<std::string> kKnownKeys = {
    "m", "n", "epsilon", "degeneracy", "domain", "cells", "t_end", "dt_safety", "record_every",
    "record_interval", "max_steps", "bound_tolerance", "energy_rise_tolerance", "snapshot_every",
    "probe", "jumps", "first_value", "delta1", "eps_list", "t_max", "t_max_exp_factor", "A", "output_dir"};

[[noreturn]] void field_error(const std::string& key, const std::string& what) {
  throw InvalidArgument("config field '" + key + "': " + what);
}

double get_real(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number()) field_error(key, "expected a number");
  return v.get<double>();
}

std::size_t get_count(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) field_error(key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::vector<double> get_reals(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_array()) field_error(key, "expected an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) field_error(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

template <class F>
auto delegate(const std::string& key, F&& f) {
  try {
    return f();
  } catch (const InvalidArgument& e) {
    field_error(key, e.what());
  }
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

json fit_json(const LineFit& f) {
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"sse", f.sse}};
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

PiecewiseConstant jump_function_of(const RunConfig& c) {
  return delegate("jumps", [&] { return make_jump_function(c.a, c.b, c.jumps, c.first_value); });
}

double t_max_for(const RunConfig& c, double eps) {
  if (c.t_max_exp_factor) return *c.t_max_exp_factor * std::exp(1.0 / eps);
  if (c.t_max) return *c.t_max;
  throw InvalidArgument("config field 't_max': required for sweeps");
}

std::optional<SlowMotionScale> scale_of(const ModelParams& p, double r, std::optional<double> a) {
  if (classify_regime(p).theta_case == ThetaCase::None) return std::nullopt;
  return theta(p, r, a);
}

std::string join(const std::vector<double>& xs, char sep) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += sep;
    out += format_real(xs[i]);
  }
  return out;
}

}  // namespace

std::size_t RunConfig::cells_for(double epsilon) const {
  if (fixed_cells) return cells;
  return static_cast<std::size_t>(std::llround((b - a) / (epsilon / kGridRatio)));
}

RunConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& item : j.items()) {
    if (!kKnownKeys.count(item.key())) field_error(item.key(), "unknown key");
  }
  for (const char* key : {"m", "n", "epsilon"}) {
    if (!j.contains(key)) field_error(key, "required");
  }

  Degeneracy deg = Degeneracy::Double;
  if (j.contains("degeneracy")) {
    if (!j["degeneracy"].is_string()) field_error("degeneracy", "expected \"double\" or \"single\"");
    deg = delegate("degeneracy", [&] { return parse_degeneracy(j["degeneracy"].get<std::string>()); });
  }
  const double m = get_real(j, "m");
  const double n = get_real(j, "n");
  const double eps = get_real(j, "epsilon");
  RunConfig c(make_params(m, n, eps, deg));

  if (j.contains("domain")) {
    const auto d = get_reals(j, "domain");
    if (d.size() != 2 || !(d[0] < d[1]) || !std::isfinite(d[0]) || !std::isfinite(d[1])) {
      field_error("domain", "expected [a, b] with a < b");
    }
    c.a = d[0];
    c.b = d[1];
  }
  if (j.contains("cells")) {
    c.cells = get_count(j, "cells");
    c.fixed_cells = true;
    if (c.cells < 4) field_error("cells", "must be >= 4");
  } else {
    c.cells = c.cells_for(eps);
  }

  SimConfig& s = c.sim;
  if (j.contains("t_end")) s.t_end = get_real(j, "t_end");
  if (!(s.t_end > 0.0)) field_error("t_end", "must be > 0");
  if (j.contains("dt_safety")) s.dt_safety = get_real(j, "dt_safety");
  if (!(s.dt_safety > 0.0 && s.dt_safety <= 1.0)) field_error("dt_safety", "must lie in (0, 1]");
  if (j.contains("record_every")) s.record_every = get_count(j, "record_every");
  if (j.contains("record_interval")) s.record_interval = get_real(j, "record_interval");
  if (s.record_interval <= 0.0 && s.record_every == 0) field_error("record_every", "must be >= 1");
  if (j.contains("max_steps")) s.max_steps = get_count(j, "max_steps");
  if (j.contains("bound_tolerance")) s.bound_tolerance = get_real(j, "bound_tolerance");
  if (j.contains("energy_rise_tolerance")) s.energy_rise_tolerance = get_real(j, "energy_rise_tolerance");
  if (j.contains("snapshot_every")) s.snapshot_every = get_count(j, "snapshot_every");
  if (j.contains("probe")) {
    const json& pj = j["probe"];
    if (!pj.is_array()) field_error("probe", "expected a list of levels or [lo, hi] pairs");
    std::vector<ProbeSet::Interval> parts;
    for (const json& item : pj) {
      if (item.is_number()) {
        parts.push_back({item.get<double>(), item.get<double>()});
      } else if (item.is_array() && item.size() == 2 && item[0].is_number() && item[1].is_number()) {
        parts.push_back({item[0].get<double>(), item[1].get<double>()});
      } else {
        field_error("probe", "expected a list of levels or [lo, hi] pairs");
      }
    }
    s.probe = delegate("probe", [&] { return ProbeSet(parts); });
  }

  if (j.contains("first_value")) {
    const json& fv = j["first_value"];
    if (!fv.is_number_integer() || (fv.get<int>() != 1 && fv.get<int>() != -1)) field_error("first_value", "must be +1 or -1");
    c.first_value = fv.get<int>();
  }
  if (j.contains("jumps")) {
    c.jumps = get_reals(j, "jumps");
    jump_function_of(c);
  }
  if (j.contains("delta1")) c.delta1 = get_real(j, "delta1");
  if (!(c.delta1 > 0.0)) field_error("delta1", "must be > 0");
  if (j.contains("eps_list")) {
    c.eps_list = get_reals(j, "eps_list");
    for (double e : c.eps_list) delegate("eps_list", [&] { return c.model.with_epsilon(e); });
  }
  if (j.contains("t_max")) {
    c.t_max = get_real(j, "t_max");
    if (!(*c.t_max > 0.0)) field_error("t_max", "must be > 0");
  }
  if (j.contains("t_max_exp_factor")) {
    c.t_max_exp_factor = get_real(j, "t_max_exp_factor");
    if (!(*c.t_max_exp_factor > 0.0)) field_error("t_max_exp_factor", "must be > 0");
  }
  if (j.contains("A")) {
    c.theta_a = get_real(j, "A");
    if (!(*c.theta_a > 0.0)) field_error("A", "must be > 0");
  }
  if (j.contains("output_dir")) {
    if (!j["output_dir"].is_string()) field_error("output_dir", "expected a string");
    c.output_dir = j["output_dir"].get<std::string>();
  }
  c.hash = fnv1a(j.dump());
  return c;
}

RunConfig load_config(const std::string& path_or_json) {
  const auto first = path_or_json.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && path_or_json[first] == '{') return parse_config(path_or_json);
  std::ifstream is(path_or_json);
  if (!is) throw InvalidArgument("cannot read config " + path_or_json);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str());
}

std::string hash_hex(std::uint64_t hash) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv_header(std::ostream& os, const std::string& subcommand, std::uint64_t hash,
                      const std::vector<std::string>& columns) {
  os << "# degenac subcommand=" << subcommand << " config=" << hash_hex(hash) << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
  os << '\n';
}

Field read_field_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot read " + path);
  std::vector<double> xs, us;
  std::string line;
  bool header = false;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      if (line.rfind("x,", 0) != 0) throw InvalidArgument(path + ": expected a header starting with x,");
      continue;
    }
    const char* s = line.c_str();
    char* end = nullptr;
    const double x = std::strtod(s, &end);
    if (end == s || *end != ',') throw InvalidArgument(path + ":" + std::to_string(lineno) + ": malformed row");
    const char* s2 = end + 1;
    const double u = std::strtod(s2, &end);
    if (end == s2) throw InvalidArgument(path + ":" + std::to_string(lineno) + ": malformed row");
    xs.push_back(x);
    us.push_back(u);
  }
  if (xs.size() < 3) throw InvalidArgument(path + ": need at least 3 rows");
  Field f(xs.front(), xs.back(), std::move(us));
  const double tol = 1e-9 * (f.b() - f.a());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (std::fabs(xs[i] - f.x(i)) > tol) throw InvalidArgument(path + ": grid is not uniform");
  }
  return f;
}

void write_field_csv(const std::string& path, const Field& u, const std::string& subcommand,
                     std::uint64_t hash) {
  std::ostringstream os;
  write_csv_header(os, subcommand, hash, {"x", "u"});
  for (std::size_t i = 0; i < u.size(); ++i) os << format_real(u.x(i)) << ',' << format_real(u[i]) << '\n';
  write_text(path, os.str());
}

std::string svg_plot(const std::string& title, const std::string& x_label, const std::string& y_label,
                     const std::vector<Series>& series) {
  constexpr double kW = 640, kH = 420, kL = 70, kR = 20, kT = 40, kB = 50;
  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!(x0 < x1)) { x0 -= 1; x1 += 1; }
  if (!(y0 < y1)) { y0 -= 1; y1 += 1; }
  const auto px = [&](double x) { return kL + (x - x0) / (x1 - x0) * (kW - kL - kR); };
  const auto py = [&](double y) { return kH - kB - (y - y0) / (y1 - y0) * (kH - kT - kB); };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n"
     << "<rect x=\"" << kL << "\" y=\"" << kT << "\" width=\"" << kW - kL - kR << "\" height=\"" << kH - kT - kB
     << "\" fill=\"none\" stroke=\"black\"/>\n"
     << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label
     << "</text>\n"
     << "<text x=\"16\" y=\"" << kH / 2 << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
     << kH / 2 << ")\">" << y_label << "</text>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
    char bx[32], by[32];
    std::snprintf(bx, sizeof bx, "%.4g", xv);
    std::snprintf(by, sizeof by, "%.4g", yv);
    os << "<text x=\"" << px(xv) << "\" y=\"" << kH - kB + 16 << "\" text-anchor=\"middle\" font-size=\"10\">" << bx
       << "</text>\n<text x=\"" << kL - 6 << "\" y=\"" << py(yv) + 3 << "\" text-anchor=\"end\" font-size=\"10\">"
       << by << "</text>\n";
  }
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const char* color = colors[si % 5];
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3.5\" fill=\"" << color << "\"/>\n";
      }
    } else {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size(); ++i) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
      }
      os << "\"/>\n";
    }
    os << "<text x=\"" << kW - kR - 8 << "\" y=\"" << kT + 16 + 14 * si << "\" text-anchor=\"end\" font-size=\"11\" fill=\""
       << color << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

int run_gamma(const RunConfig& config, std::ostream& out) {
  const ModelParams& p = config.model;
  const auto closed = gamma_closed_form(p);
  const Regime regime = classify_regime(p);
  json j = {{"m", p.m()},
            {"n", p.n()},
            {"degeneracy", std::string(to_string(p.degeneracy()))},
            {"regime", std::string(to_string(regime.tag))},
            {"theta_case", std::string(to_string(regime.theta_case))},
            {"gamma_quadrature", gamma_constant(p)},
            {"gamma_closed_form", closed ? json(*closed) : json(nullptr)},
            {"beta_identity", gamma_beta_identity(p)},
            {"beta_identity_unshifted", gamma_beta_identity_unshifted(p)}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_wave(const RunConfig& config, const WaveRequest& request, std::ostream& out) {
  if (!(request.a < request.b) || request.points < 3) throw InvalidArgument("--grid needs a < b and N >= 3");
  std::vector<double> grid(request.points);
  for (std::size_t i = 0; i < request.points; ++i) {
    grid[i] = request.a + (request.b - request.a) * static_cast<double>(i) / static_cast<double>(request.points - 1);
  }
  const StandingWave wave = standing_wave(config.model, grid);
  const auto residuals = wave_residuals(wave);

  std::ostringstream os;
  write_csv_header(os, "wave", config.hash, {"x", "phi", "residual"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << format_real(grid[i]) << ',' << format_real(wave.phis()[i]) << ',' << format_real(residuals[i]) << '\n';
  }
  write_text(request.out, os.str());
  if (request.plot) {
    write_text(fs::path(request.out).replace_extension(".svg"),
               svg_plot("standing wave", "x", "phi",
                        {{"phi", grid, {wave.phis().begin(), wave.phis().end()}, false}}));
  }
  const json j = {{"shape", std::string(to_string(wave.shape()))},
                  {"omega1", std::isfinite(wave.omega1()) ? json(wave.omega1()) : json(nullptr)},
                  {"omega2", std::isfinite(wave.omega2()) ? json(wave.omega2()) : json(nullptr)},
                  {"max_residual", wave_residual(wave)}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_profile(const RunConfig& config, const ProfileRequest& request, std::ostream& out) {
  const PiecewiseConstant v = jump_function_of(config);
  const TransitionProfile prof = build_profile(config.model, v, config.cells);
  write_field_csv(request.out, prof.field, "profile", config.hash);
  const json j = {{"kind", "profile"},
                  {"config", hash_hex(config.hash)},
                  {"stationary", prof.stationary},
                  {"energy", prof.energy},
                  {"epsilon_bar", std::isfinite(prof.epsilon_bar) ? json(prof.epsilon_bar) : json(nullptr)},
                  {"cells", config.cells},
                  {"jumps", prof.jumps}};
  write_text(fs::path(request.out).replace_extension(".json"), j.dump(2) + "\n");
  if (request.plot) {
    const auto xs = prof.field.nodes();
    write_text(fs::path(request.out).replace_extension(".svg"),
               svg_plot("transition profile", "x", "u",
                        {{"u", xs, {prof.field.values().begin(), prof.field.values().end()}, false}}));
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_energy(const RunConfig& config, const EnergyRequest& request, std::ostream& out) {
  const ModelParams& p = config.model;
  Field u = request.init.empty() ? build_profile(p, jump_function_of(config), config.cells).field
                                 : read_field_csv(request.init);
  const EnergyReport e = energy(p, u);
  const double gamma = gamma_constant(p);
  json j = {{"total", e.total}, {"gradient_part", e.gradient_part}, {"potential_part", e.potential_part},
            {"gamma", gamma}};
  if (!config.jumps.empty()) {
    const PiecewiseConstant v = jump_function_of(config);
    const double r = max_r(v);
    const auto n = static_cast<int>(v.jump_count());
    j["n_gamma"] = n * gamma;
    if (const auto scale = scale_of(p, r, config.theta_a)) {
      const double th = (*scale)(p.epsilon());
      j["theta"] = th;
      j["lower_bound"] = n * gamma - th;
      j["above_lower_bound"] = e.total >= n * gamma - th;
    }
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

int run_simulate(const RunConfig& config, const SimulateRequest& request, std::ostream& out) {
  const ModelParams& p = config.model;
  const Field initial = request.init.empty() ? build_profile(p, jump_function_of(config), config.cells).field
                                             : read_field_csv(request.init);
  StopPredicate stop;
  std::vector<double> reference;
  if (request.stop_on_exit) {
    reference = interface_set(initial, config.sim.probe).positions;
    if (reference.empty()) throw InvalidArgument("initial data has no interfaces to track");
    stop = exit_predicate(reference, config.delta1);
  }
  const SimTrace trace = simulate(p, initial, config.sim, stop);

  const fs::path dir(request.out_dir);
  fs::create_directories(dir);
  std::ostringstream os;
  write_csv_header(os, "simulate", config.hash,
                   {"t", "energy", "dissipation", "bound_violation", "interface_count", "interfaces"});
  double worst_rise = 0.0;
  for (std::size_t k = 0; k < trace.times.size(); ++k) {
    os << format_real(trace.times[k]) << ',' << format_real(trace.energies[k]) << ','
       << format_real(trace.dissipation[k]) << ',' << format_real(trace.bound_history[k]) << ','
       << trace.interface_positions[k].size() << ',' << join(trace.interface_positions[k], ';') << '\n';
    if (k > 0) worst_rise = std::max(worst_rise, trace.energies[k] - trace.energies[k - 1]);
  }
  write_text(dir / "trace.csv", os.str());
  for (std::size_t s = 0; s < trace.snapshots.size(); ++s) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.csv", s);
    std::ostringstream ss;
    ss << "# t=" << format_real(trace.snapshot_times[s]) << '\n';
    write_csv_header(ss, "simulate", config.hash, {"x", "u"});
    const Field& f = trace.snapshots[s];
    for (std::size_t i = 0; i < f.size(); ++i) ss << format_real(f.x(i)) << ',' << format_real(f[i]) << '\n';
    write_text(dir / name, ss.str());
  }

  const double e0 = trace.energies.front();
  const double monotone = e0 > 0.0 ? worst_rise / e0 : worst_rise;
  json j = {{"kind", "trace"},
            {"config", hash_hex(config.hash)},
            {"steps", trace.steps},
            {"stop_reason", to_string(trace.stop_reason)},
            {"final_time", trace.times.back()},
            {"energy_identity_residual", trace.energies.size() >= 2 ? json(energy_identity_residual(trace)) : json(nullptr)},
            {"max_energy_rise", trace.max_energy_rise},
            {"max_record_energy_rise", monotone},
            {"bound_violation", trace.bound_violation},
            {"warnings", trace.warnings},
            {"checks",
             {{"energy_monotone", monotone <= 1e-10},
              {"bound_surrogate", trace.bound_violation <= 1e-6}}}};
  if (request.stop_on_exit) {
    const ExitTime ex = exit_time(trace, reference, config.delta1);
    j["exit"] = {{"time", ex.time}, {"censored", ex.censored}, {"annihilated", ex.annihilated}};
  }
  write_text(dir / "trace.json", j.dump(2) + "\n");
  if (request.plot) {
    write_text(dir / "energy.svg", svg_plot("energy", "t", "E", {{"E", trace.times, trace.energies, false}}));
  }
  out << j.dump(2) << '\n';
  switch (trace.stop_reason) {
    case StopReason::TEnd: return kExitOk;
    case StopReason::Predicate: return kExitPredicateStop;
    case StopReason::MaxSteps: return kExitMaxSteps;
  }
  return kExitOk;
}

int run_sweep(const RunConfig& config, const SweepRequest& request, std::ostream& out) {
  if (config.eps_list.empty()) throw InvalidArgument("config field 'eps_list': required for sweeps");
  const PiecewiseConstant v = jump_function_of(config);
  if (!(config.delta1 < max_r(v))) field_error("delta1", "must be < max_r of the jumps");

  struct Point {
    double eps;
    double t_max;
    ExitRun run;
    std::exception_ptr error;
  };
  std::vector<Point> points;
  for (double e : config.eps_list) points.push_back({e, t_max_for(config, e), {}, nullptr});

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      Point& pt = points[i];
      try {
        const ModelParams p = config.model.with_epsilon(pt.eps);
        const Field init = build_profile(p, v, config.cells_for(pt.eps)).field;
        ExitRunOptions o;
        o.delta1 = config.delta1;
        o.t_max = pt.t_max;
        o.dt_safety = config.sim.dt_safety;
        o.max_steps = config.sim.max_steps;
        o.probe = config.sim.probe;
        pt.run = measure_exit_time(p, init, o);
      } catch (...) {
        pt.error = std::current_exception();
      }
    }
  };
  const unsigned jobs = std::max(1u, std::min<unsigned>(request.jobs, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < jobs; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& pt : points) {
    if (pt.error) std::rethrow_exception(pt.error);
  }
  std::sort(points.begin(), points.end(), [](const Point& x, const Point& y) { return x.eps < y.eps; });

  std::vector<TimescalePoint> tp;
  std::vector<bool> mask;
  for (const auto& pt : points) {
    tp.push_back({pt.eps, pt.run.exit.time});
    mask.push_back(pt.run.exit.censored);
  }
  const TimescaleFit fit = fit_timescale(tp, mask);

  const double r = max_r(v);
  std::ostringstream os;
  write_csv_header(os, "sweep", config.hash,
                   {"epsilon", "exit_time", "censored", "annihilated", "t_max", "steps", "record_interval", "theta_inverse"});
  json jpoints = json::array();
  bool scale_check = true;
  bool scale_known = false;
  for (const auto& pt : points) {
    const ModelParams p = config.model.with_epsilon(pt.eps);
    const auto scale = scale_of(p, r, config.theta_a);
    const double inv = scale ? 1.0 / (*scale)(pt.eps) : NAN;
    if (scale && !pt.run.exit.censored) {
      scale_known = true;
      scale_check = scale_check && pt.run.exit.time > inv;
    }
    os << format_real(pt.eps) << ',' << format_real(pt.run.exit.time) << ',' << pt.run.exit.censored << ','
       << pt.run.exit.annihilated << ',' << format_real(pt.t_max) << ',' << pt.run.steps << ','
       << format_real(pt.run.record_interval) << ',' << format_real(inv) << '\n';
    jpoints.push_back({{"epsilon", pt.eps},
                       {"exit_time", pt.run.exit.time},
                       {"censored", pt.run.exit.censored},
                       {"annihilated", pt.run.exit.annihilated},
                       {"t_max", pt.t_max},
                       {"stop_reason", to_string(pt.run.stop_reason)},
                       {"steps", pt.run.steps},
                       {"theta_inverse", std::isfinite(inv) ? json(inv) : json(nullptr)}});
  }
  write_text(request.out, os.str());

  json bounds = json::array();
  for (const auto& b : fit.bounds) {
    bounds.push_back({{"epsilon", b.epsilon},
                      {"lower_bound", b.lower_bound},
                      {"predicted", b.predicted ? json(*b.predicted) : json(nullptr)},
                      {"consistent", b.consistent}});
  }
  const Regime regime = classify_regime(config.model);
  json j = {{"kind", "sweep"},
            {"config", hash_hex(config.hash)},
            {"m", config.model.m()},
            {"n", config.model.n()},
            {"degeneracy", std::string(to_string(config.model.degeneracy()))},
            {"theta_case", std::string(to_string(regime.theta_case))},
            {"delta1", config.delta1},
            {"points", jpoints},
            {"verdict", to_string(fit.verdict)},
            {"exp_fit", fit_json(fit.exp_fit)},
            {"alg_fit", fit_json(fit.alg_fit)},
            {"censored_bounds", bounds},
            {"diagnostics", fit.diagnostics},
            {"checks", {{"theta_scale", scale_known ? json(scale_check) : json(nullptr)}}}};
  if (regime.theta_case == ThetaCase::E4 || regime.theta_case == ThetaCase::E5) {
    const double beta = kj_sequence(config.model, 1).beta;
    j["beta"] = std::isfinite(beta) ? json(beta) : json(nullptr);
  }
  write_text(fs::path(request.out).replace_extension(".json"), j.dump(2) + "\n");

  if (request.plot) {
    std::vector<double> inv, loginv, logt;
    for (const auto& pt : points) {
      inv.push_back(1.0 / pt.eps);
      loginv.push_back(std::log(1.0 / pt.eps));
      logt.push_back(std::log(pt.run.exit.time));
    }
    const auto line = [&](const std::vector<double>& x, const LineFit& f) {
      std::vector<double> y;
      for (double xv : x) y.push_back(f.intercept + f.slope * xv);
      return y;
    };
    const fs::path base = fs::path(request.out).replace_extension("");
    write_text(base.string() + "_exp.svg", svg_plot("ln T vs 1/eps", "1/eps", "ln T",
                                                    {{"measured", inv, logt, true}, {"fit", inv, line(inv, fit.exp_fit), false}}));
    write_text(base.string() + "_alg.svg",
               svg_plot("ln T vs ln(1/eps)", "ln(1/eps)", "ln T",
                        {{"measured", loginv, logt, true}, {"fit", loginv, line(loginv, fit.alg_fit), false}}));
  }
  out << j.dump(2) << '\n';
  const bool all_censored = std::all_of(mask.begin(), mask.end(), [](bool c) { return c; });
  return all_censored ? kExitCensoredOnly : kExitOk;
}

int run_report(const std::string& dir, std::ostream& out) {
  if (!fs::is_directory(dir)) throw InvalidArgument("report: not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  json sweeps = json::array(), traces = json::array();
  bool all_pass = true;
  for (const auto& f : files) {
    std::ifstream is(f);
    json j = json::parse(is, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("kind")) continue;
    const std::string rel = fs::relative(f, dir).generic_string();
    const auto collect = [&](const json& checks) {
      for (const auto& c : checks.items()) {
        if (c.value().is_boolean() && !c.value().get<bool>()) all_pass = false;
      }
    };
    if (j["kind"] == "sweep") {
      sweeps.push_back({{"path", rel}, {"verdict", j["verdict"]}, {"exp_fit", j["exp_fit"]}, {"alg_fit", j["alg_fit"]},
                        {"censored_bounds", j["censored_bounds"]}, {"checks", j["checks"]}});
      collect(j["checks"]);
    } else if (j["kind"] == "trace") {
      traces.push_back({{"path", rel}, {"stop_reason", j["stop_reason"]},
                        {"energy_identity_residual", j["energy_identity_residual"]}, {"checks", j["checks"]}});
      collect(j["checks"]);
    }
  }
  if (sweeps.empty() && traces.empty()) throw InvalidArgument("report: no sweep or trace JSON under " + dir);
  const json j = {{"sweeps", sweeps}, {"traces", traces}, {"all_checks_pass", all_pass}};
  out << j.dump(2) << '\n';
  return kExitOk;
}

unsigned resolve_jobs(unsigned flag) {
  if (const char* env = std::getenv("DEGENAC_JOBS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    throw InvalidArgument("DEGENAC_JOBS must be a positive integer");
  }
  return std::max(1u, flag);
}

void set_t_max(RunConfig& config, const std::string& text) {
  static const std::regex exp_form(R"(^\s*([0-9.eE+-]+)\s*\*\s*exp\(\s*1\s*/\s*eps\s*\)\s*$)");
  std::smatch m;
  try {
    if (std::regex_match(text, m, exp_form)) {
      const double c = std::stod(m[1].str());
      if (!(c > 0.0)) throw InvalidArgument("");
      config.t_max_exp_factor = c;
      config.t_max.reset();
      return;
    }
    std::size_t used = 0;
    const double t = std::stod(text, &used);
    if (used != text.size() || !(t > 0.0)) throw InvalidArgument("");
    config.t_max = t;
    config.t_max_exp_factor.reset();
  } catch (const std::exception&) {
    throw InvalidArgument("--t-max expects a positive number or C*exp(1/eps), got '" + text + "'");
  }
}

}  // namespace degenac::cli
