#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "degenac/cli.hpp"
#include "degenac/error.hpp"

namespace dc = degenac::cli;

namespace {

std::vector<double> parse_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) {
      throw degenac::InvalidArgument(std::string(flag) + ": not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"degenac: degenerate Allen-Cahn layers, energies and slow motion"};
  app.require_subcommand(1);

  std::string config_arg;
  std::string jumps, domain, eps_list, t_max, grid = "-4,4,801", init, out, dir;
  int first_value = 0;
  double t_end = 0.0, delta1 = 0.0;
  bool plot = false, stop_on_exit = false;
  unsigned jobs = 1;

  auto add_config = [&](CLI::App* sub) {
    sub->add_option("--config", config_arg, "JSON file or inline JSON object")->required();
  };
  auto add_layout = [&](CLI::App* sub) {
    sub->add_option("--jumps", jumps, "comma-separated jump positions");
    sub->add_option("--domain", domain, "a,b");
    sub->add_option("--first-value", first_value, "+1 or -1 on (a, h_1)");
  };

  auto* gamma = app.add_subcommand("gamma", "transition constant by quadrature and closed forms");
  add_config(gamma);

  auto* wave = app.add_subcommand("wave", "sample the standing wave");
  add_config(wave);
  wave->add_option("--grid", grid, "a,b,N");
  wave->add_option("--out", out, "CSV path")->default_str("wave.csv");
  wave->add_flag("--plot", plot, "also write an SVG");

  auto* profile = app.add_subcommand("profile", "glued N-layer profile");
  add_config(profile);
  add_layout(profile);
  profile->add_option("--out", out, "CSV path")->default_str("profile.csv");
  profile->add_flag("--plot", plot, "also write an SVG");

  auto* energy = app.add_subcommand("energy", "discrete energy and lower bound");
  add_config(energy);
  add_layout(energy);
  energy->add_option("--init", init, "field CSV; the configured profile when omitted");

  auto* simulate = app.add_subcommand("simulate", "integrate the PDE");
  add_config(simulate);
  add_layout(simulate);
  simulate->add_option("--init", init, "field CSV; the configured profile when omitted");
  simulate->add_option("--t-end", t_end, "final time");
  simulate->add_option("--out", out, "output directory")->default_str("trace");
  simulate->add_option("--delta1", delta1, "exit threshold");
  simulate->add_flag("--stop-on-exit", stop_on_exit, "stop once interfaces move more than delta1");
  simulate->add_flag("--plot", plot, "also write an SVG of E(t)");

  auto* sweep = app.add_subcommand("sweep", "exit times across epsilon and scaling fit");
  add_config(sweep);
  add_layout(sweep);
  sweep->add_option("--eps", eps_list, "comma-separated epsilons");
  sweep->add_option("--delta1", delta1, "exit threshold");
  sweep->add_option("--t-max", t_max, "horizon: T or C*exp(1/eps)");
  sweep->add_option("--out", out, "CSV path")->default_str("sweep.csv");
  sweep->add_option("--jobs", jobs, "worker threads (DEGENAC_JOBS overrides)");
  sweep->add_flag("--plot", plot, "also write SVGs of both regressions");

  auto* report = app.add_subcommand("report", "aggregate sweep and trace JSON");
  report->add_option("--dir", dir, "directory to scan")->required();
  report->add_option("--out", out, "JSON path; stdout when omitted");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : dc::kExitConfig;
  }

  try {
    if (report->parsed()) {
      if (out.empty()) return dc::run_report(dir, std::cout);
      std::ostringstream os;
      const int code = dc::run_report(dir, os);
      std::ofstream(out) << os.str();
      return code;
    }

    dc::RunConfig config = dc::load_config(config_arg);
    if (!jumps.empty()) config.jumps = parse_list(jumps, "--jumps");
    if (!domain.empty()) {
      const auto d = parse_list(domain, "--domain");
      if (d.size() != 2 || !(d[0] < d[1])) throw degenac::InvalidArgument("--domain expects a,b with a < b");
      config.a = d[0];
      config.b = d[1];
      if (!config.fixed_cells) config.cells = config.cells_for(config.model.epsilon());
    }
    if (first_value != 0) {
      if (first_value != 1 && first_value != -1) throw degenac::InvalidArgument("--first-value must be +1 or -1");
      config.first_value = first_value;
    }
    if (delta1 != 0.0) {
      if (!(delta1 > 0.0)) throw degenac::InvalidArgument("--delta1 must be > 0");
      config.delta1 = delta1;
    }

    if (gamma->parsed()) return dc::run_gamma(config, std::cout);
    if (wave->parsed()) {
      const auto g = parse_list(grid, "--grid");
      if (g.size() != 3 || g[2] < 3) throw degenac::InvalidArgument("--grid expects a,b,N with N >= 3");
      dc::WaveRequest r{g[0], g[1], static_cast<std::size_t>(g[2]), out.empty() ? "wave.csv" : out, plot};
      return dc::run_wave(config, r, std::cout);
    }
    if (profile->parsed()) return dc::run_profile(config, {out.empty() ? "profile.csv" : out, plot}, std::cout);
    if (energy->parsed()) return dc::run_energy(config, {init}, std::cout);
    if (simulate->parsed()) {
      if (t_end != 0.0) {
        if (!(t_end > 0.0)) throw degenac::InvalidArgument("--t-end must be > 0");
        config.sim.t_end = t_end;
      }
      return dc::run_simulate(config, {init, out.empty() ? "trace" : out, stop_on_exit, plot}, std::cout);
    }
    if (sweep->parsed()) {
      if (!eps_list.empty()) config.eps_list = parse_list(eps_list, "--eps");
      if (!t_max.empty()) dc::set_t_max(config, t_max);
      return dc::run_sweep(config, {out.empty() ? "sweep.csv" : out, dc::resolve_jobs(jobs), plot}, std::cout);
    }
  } catch (const degenac::InvalidArgument& e) {
    std::cerr << "degenac: " << e.what() << '\n';
    return dc::kExitConfig;
  } catch (const degenac::NumericalError& e) {
    std::cerr << "degenac: numerical failure: " << e.what() << '\n';
    return dc::kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "degenac: " << e.what() << '\n';
    return 1;
  }
  return dc::kExitConfig;
}
