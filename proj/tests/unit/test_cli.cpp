#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "degenac/cli.hpp"
#include "degenac/error.hpp"
#include "degenac/profiles.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace degenac;
namespace cli = degenac::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("degenac_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const char* kBase = R"({"m":2,"n":4,"epsilon":0.1,"degeneracy":"double","domain":[-4,4]})";

int tool(const std::string& args, const fs::path& cwd) {
  const std::string cmd = "cd '" + cwd.string() + "' && '" DEGENAC_TOOL "' " + args + " > out.txt 2> err.txt";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("parse_config examples") {
  auto c = cli::parse_config(kBase);
  CHECK(c.cells == 1600);
  CHECK_FALSE(c.fixed_cells);
  CHECK(c.a == -4.0);
  CHECK(c.b == 4.0);
  CHECK(c.sim.dt_safety == 0.5);
  CHECK(c.model.degeneracy() == Degeneracy::Double);
  CHECK(c.cells_for(0.05) == 3200);

  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"m":2,"epsilon":0.1})"), doctest::Contains("'n'"), InvalidArgument);
  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"m":2,"n":1,"epsilon":0.1})"), doctest::Contains("n below 2"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"m":2,"n":4,"epsilon":0.1,"colour":1})"), doctest::Contains("colour"),
                       InvalidArgument);
  CHECK_THROWS_WITH_AS(cli::parse_config(R"({"m":2,"n":4,"epsilon":0.1,"domain":[1,0]})"),
                       doctest::Contains("domain"), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_config("{not json"), InvalidArgument);

  c = cli::parse_config(R"({"m":2,"n":4,"epsilon":0.1,"cells":500,"jumps":[-1,1],"first_value":1})");
  CHECK(c.cells == 500);
  CHECK(c.fixed_cells);
  CHECK(c.cells_for(0.05) == 500);
  CHECK(c.jumps == std::vector<double>{-1, 1});
  CHECK(c.first_value == 1);

  CHECK(cli::load_config(kBase).hash != c.hash);
  // canonical JSON: key order and spacing do not change the hash
  CHECK(cli::parse_config(R"({"n":4, "m":2,"epsilon":0.1,"domain":[-4,4],"degeneracy":"double"})").hash ==
        cli::parse_config(kBase).hash);
  CHECK(cli::hash_hex(cli::parse_config(kBase).hash).size() == 16);
}

TEST_CASE("t_max and jobs helpers") {
  auto c = cli::parse_config(kBase);
  cli::set_t_max(c, "10*exp(1/eps)");
  REQUIRE(c.t_max_exp_factor.has_value());
  CHECK(*c.t_max_exp_factor == 10.0);
  cli::set_t_max(c, "250");
  CHECK(*c.t_max == 250.0);
  CHECK_FALSE(c.t_max_exp_factor.has_value());
  CHECK_THROWS_AS(cli::set_t_max(c, "-1"), InvalidArgument);
  CHECK_THROWS_AS(cli::set_t_max(c, "ten"), InvalidArgument);
  if (std::getenv("DEGENAC_JOBS") == nullptr) {
    CHECK(cli::resolve_jobs(0) == 1);
    CHECK(cli::resolve_jobs(3) == 3);
  }
}

TEST_CASE("format_real keeps every digit") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 16.0 / 35.0}) {
    CHECK(std::stod(cli::format_real(x)) == x);
  }
  CHECK(cli::format_real(0.5) == "0.5");
}

TEST_CASE("field CSV round trip") {
  const auto dir = scratch("roundtrip");
  const auto p = make_params(2, 4, 0.1, Degeneracy::Double);
  const auto prof = build_profile(p, make_jump_function(-4, 4, {-1.234567, 0.5}, -1), 1600);
  const auto path = (dir / "u.csv").string();
  cli::write_field_csv(path, prof.field, "profile", 42);
  const auto back = cli::read_field_csv(path);
  REQUIRE(back.same_grid(prof.field));
  for (std::size_t i = 0; i < back.size(); ++i) CHECK(back[i] == prof.field[i]);
  CHECK(slurp(path).rfind("# degenac subcommand=profile config=000000000000002a\nx,u\n", 0) == 0);

  std::ofstream(dir / "bad.csv") << "x,u\n0,0\n1,0\n3,0\n";
  CHECK_THROWS_AS(cli::read_field_csv((dir / "bad.csv").string()), InvalidArgument);
  std::ofstream(dir / "junk.csv") << "x,u\n0,zero\n";
  CHECK_THROWS_AS(cli::read_field_csv((dir / "junk.csv").string()), InvalidArgument);
}

TEST_CASE("gamma subcommand") {
  std::ostringstream os;
  CHECK(cli::run_gamma(cli::parse_config(kBase), os) == cli::kExitOk);
  const auto j = json::parse(os.str());
  CHECK(j["gamma_quadrature"].get<double>() == doctest::Approx(16.0 / 35.0).epsilon(1e-10));
  CHECK(j["gamma_closed_form"].get<double>() == doctest::Approx(16.0 / 35.0).epsilon(1e-12));
  CHECK(j["beta_identity_unshifted"].get<double>() == doctest::Approx(16.0 / 105.0).epsilon(1e-12));
  CHECK(j["regime"] == "ExponentialTails");
  os.str("");
  cli::run_gamma(cli::parse_config(R"({"m":2,"n":6.5,"epsilon":0.1})"), os);
  CHECK(json::parse(os.str())["gamma_closed_form"].is_null());
}

TEST_CASE("property: identical configs give byte-identical CSVs") {
  const auto a = scratch("det_a"), b = scratch("det_b");
  auto c = cli::parse_config(R"({"m":2,"n":2,"epsilon":0.1,"jumps":[-3.4,-2,-0.5,0.8,2.2,3.2],"cells":800})");
  std::ostringstream sink;
  for (const auto& dir : {a, b}) {
    CHECK(cli::run_profile(c, {(dir / "profile.csv").string(), true}, sink) == 0);
    cli::WaveRequest w;
    w.out = (dir / "wave.csv").string();
    CHECK(cli::run_wave(c, w, sink) == 0);
    c.sim.t_end = 0.05;
    c.sim.record_every = 20;
    CHECK(cli::run_simulate(c, {"", (dir / "trace").string(), false, false}, sink) == cli::kExitOk);
  }
  for (const char* f : {"profile.csv", "profile.json", "profile.svg", "wave.csv", "trace/trace.csv",
                        "trace/snapshot_0000.csv"}) {
    INFO(f);
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto side = json::parse(slurp(a / "profile.json"));
  CHECK(side["stationary"] == true);
  CHECK(side["epsilon_bar"].get<double>() == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-12));  // max_r = gap 1.0 / 2

  // round trip through the file the profile subcommand wrote
  const auto loaded = cli::read_field_csv((a / "profile.csv").string());
  const auto rebuilt = build_profile(c.model, make_jump_function(-4, 4, c.jumps, -1), 800);
  for (std::size_t i = 0; i < loaded.size(); ++i) CHECK(loaded[i] == rebuilt.field[i]);
}

TEST_CASE("simulate and report subcommands") {
  const auto dir = scratch("sim");
  auto c = cli::parse_config(R"({"m":2,"n":4,"epsilon":0.1,"jumps":[-0.2,0.2],"cells":800,"t_end":40})");
  std::ostringstream sink;
  CHECK(cli::run_simulate(c, {"", (dir / "pair").string(), true, false}, sink) == cli::kExitPredicateStop);
  auto j = json::parse(slurp(dir / "pair" / "trace.json"));
  CHECK(j["kind"] == "trace");
  CHECK(j["stop_reason"] == "predicate");
  CHECK(j["exit"]["censored"] == false);

  c.sim.max_steps = 5;
  CHECK(cli::run_simulate(c, {"", (dir / "capped").string(), false, false}, sink) == cli::kExitMaxSteps);
  c.sim.max_steps = std::numeric_limits<std::size_t>::max();

  c.eps_list = {0.1, 0.12, 0.14};
  c.t_max = 0.01;
  std::ostringstream sweep_out;
  CHECK(cli::run_sweep(c, {(dir / "s" / "sweep.csv").string(), 2, false}, sweep_out) == cli::kExitCensoredOnly);
  const auto csv = slurp(dir / "s" / "sweep.csv");
  CHECK(csv.find("epsilon,exit_time,censored") != std::string::npos);
  j = json::parse(slurp(dir / "s" / "sweep.json"));
  CHECK(j["verdict"] == "Inconclusive");

  std::ostringstream rep;
  CHECK(cli::run_report(dir.string(), rep) == 0);
  j = json::parse(rep.str());
  CHECK(j["sweeps"].size() == 1);
  CHECK(j["traces"].size() == 2);
  CHECK(j.contains("all_checks_pass"));
  CHECK_THROWS_AS(cli::run_report((dir / "nowhere").string(), rep), InvalidArgument);
}

TEST_CASE("tool exit codes") {
  const auto dir = scratch("tool");
  std::ofstream(dir / "c.json") << kBase;
  std::ofstream(dir / "bad.json") << R"({"m":2,"epsilon":0.1})";
  CHECK(tool("gamma --config c.json", dir) == 0);
  CHECK(json::parse(slurp(dir / "out.txt"))["gamma_quadrature"].get<double>() ==
        doctest::Approx(0.45714285714285713).epsilon(1e-10));
  CHECK(tool("gamma --config bad.json", dir) == 2);
  CHECK(slurp(dir / "err.txt").find("'n'") != std::string::npos);
  CHECK(tool("gamma", dir) == 2);
  CHECK(tool("profile --config c.json --jumps -1,1 --out p.csv", dir) == 0);
  CHECK(tool("energy --config c.json --init p.csv --jumps -1,1", dir) == 0);
  CHECK(tool("simulate --config c.json --jumps 0.5 --t-end 0.01 --out tr", dir) == 0);
  CHECK(fs::exists(dir / "tr" / "trace.csv"));
  CHECK(tool("report --dir .", dir) == 0);
  CHECK(tool("profile --config c.json --jumps 1,-1", dir) == 2);
}
