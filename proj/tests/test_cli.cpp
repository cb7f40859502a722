#include "lioueps/cli/config.hpp"
#include "lioueps/cli/execute.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lioueps;
using namespace lioueps::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lioueps_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool has_error(const ParseResult& r, const std::string& needle) {
  for (const auto& e : r.errors)
    if (e.find(needle) != std::string::npos) return true;
  return false;
}

int run_with(const fs::path& dir, const std::string& config, std::vector<std::string> extra = {}) {
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << config;
  std::vector<std::string> args{"lioueps", cfg.string(), "--output-dir", dir.string()};
  args.insert(args.end(), extra.begin(), extra.end());
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace

TEST_CASE("valid ep-locate config") {
  const auto r = parse_config(
      R"({"command":"ep-locate","model":{"name":"example2","omega_x":1.0},"sweep":{"param":"gamma_minus","from":3,"to":5,"steps":64}})");
  REQUIRE(r.config);
  CHECK(r.config->command == "ep-locate");
  CHECK(r.config->params.at("gamma_minus") == 1.0);
  CHECK(r.config->sweep->steps == 64);
  CHECK(r.errors.empty());
}

TEST_CASE("negative rate names the field") {
  const auto r = parse_config(R"({"command":"spectrum","model":{"name":"example2","gamma_minus":-1}})");
  CHECK_FALSE(r.config);
  CHECK(has_error(r, "model.gamma_minus"));
}

TEST_CASE("unknown model lists the families") {
  const auto r = parse_config(R"({"command":"spectrum","model":{"name":"example9"}})");
  CHECK_FALSE(r.config);
  CHECK(has_error(r, "example1"));
  CHECK(has_error(r, "dephasing"));
}

TEST_CASE("every error is reported, unknown keys included") {
  const auto r = parse_config(
      R"({"command":"sweep","model":{"name":"example1","gamma_x":-2,"colour":1},"extra":true,"sweep":{"param":"gamma_x","from":0,"to":1,"steps":1}})");
  CHECK_FALSE(r.config);
  CHECK(has_error(r, "model.gamma_x"));
  CHECK(has_error(r, "colour"));
  CHECK(has_error(r, "extra"));
  CHECK(has_error(r, "sweep.steps"));
  CHECK(r.errors.size() >= 4);
}

TEST_CASE("malformed JSON reports line and column") {
  const auto r = parse_config("{\n  \"command\": \"spectrum\",\n  \"model\": {\"name\": }\n}");
  CHECK_FALSE(r.config);
  CHECK(has_error(r, "line 3"));
}

TEST_CASE("duplicate keys are rejected") {
  const auto r = parse_config(R"({"command":"spectrum","command":"verify","model":{"name":"example2"}})");
  CHECK_FALSE(r.config);
}

TEST_CASE("sweep commands require a sweep section") {
  CHECK_FALSE(parse_config(R"({"command":"sweep","model":{"name":"example2"}})").config);
}

TEST_CASE("state specifications") {
  const auto ok = parse_config(
      R"({"command":"dynamics","model":{"name":"example2"},"dynamics":{"rho0":"e","t_max":1,"n_times":5}})");
  REQUIRE(ok.config);
  CHECK(ok.config->dynamics->rho0.index == 1);
  CHECK(parse_config(R"({"command":"dynamics","model":{"name":"example2"},"dynamics":{"rho0":[[0,1],[1,0]]}})").config);
  CHECK_FALSE(
      parse_config(R"({"command":"dynamics","model":{"name":"dephasing"},"dynamics":{"rho0":"e"}})").config);
  CHECK_FALSE(parse_config(
                  R"({"command":"trajectories","model":{"name":"example2"},"trajectories":{"psi0":"mixed"}})")
                  .config);
}

TEST_CASE("exit codes") {
  const auto dir = scratch("exit");
  CHECK(run_with(dir, R"({"command":"verify","model":{"name":"dephasing"}})") == kOk);
  CHECK(run_with(dir, R"({"command":"verify","model":{"name":"dephasing"},)") == kConfigError);
  CHECK(run_with(dir, R"({"command":"spectrum","model":{"name":"example2","gamma_minus":-1}})") == kConfigError);
  // Amplitude count does not match the Hilbert space: domain error.
  CHECK(run_with(dir, R"({"command":"dynamics","model":{"name":"dephasing","levels":3},"dynamics":{"rho0":[1,0]}})") ==
        kDomainError);
  // Constant family in the bracket: no EP.
  CHECK(run_with(dir,
                 R"({"command":"ep-locate","model":{"name":"dephasing","levels":2},"sweep":{"param":"omega","from":1,"to":2,"steps":8}})") ==
        kNumericalError);
  std::ofstream(dir / "blocker") << "x";
  std::ofstream(dir / "s.json") << R"({"command":"spectrum","model":{"name":"example2"}})";
  std::ostringstream out, err;
  const std::string s_json = (dir / "s.json").string(), blocked = (dir / "blocker" / "sub").string();
  const char* io[] = {"lioueps", s_json.c_str(), "--output-dir", blocked.c_str()};
  CHECK(run_cli(4, io, out, err) == kIoError);
  const char* argv[] = {"lioueps", (dir / "missing.json").c_str()};
  CHECK(run_cli(2, argv, out, err) == kIoError);
  const char* bad[] = {"lioueps", "--threads", "zero"};
  CHECK(run_cli(3, bad, out, err) == kConfigError);
}

TEST_CASE("output files, headers and 17-digit formatting") {
  const auto dir = scratch("files");
  REQUIRE(run_with(dir,
                   R"({"command":"sweep","model":{"name":"example1","omega":1,"gamma_y":2,"gamma_minus":0},"sweep":{"param":"gamma_x","from":0,"to":4,"steps":21},"output":"ex1"})") ==
          kOk);
  const std::string csv = slurp(dir / "ex1_eigenvalues.csv");
  CHECK(csv.rfind("# lioueps", 0) == 0);
  CHECK(csv.find("# config: {") != std::string::npos);
  CHECK(csv.find("param,index,re_lambda,im_lambda,branch_id\n") != std::string::npos);
  CHECK(csv.find("-0.26794919243112258") != std::string::npos);  // −2 + √3 at γx = 0
  CHECK(fs::exists(dir / "ex1_overlaps.csv"));
  CHECK(fs::exists(dir / "ex1_matching.csv"));

  REQUIRE(run_with(dir,
                   R"({"command":"ep-locate","model":{"name":"example2","omega_x":1.0},"sweep":{"param":"gamma_minus","from":3,"to":5,"steps":64},"output":"ex2"})") ==
          kOk);
  const std::string ep = slurp(dir / "ex2_ep.json");
  CHECK(ep.find("\"param_value\": 3.99999999999") != std::string::npos);
  CHECK(ep.find("\"order_estimate\": 2") != std::string::npos);
}

TEST_CASE("identical config and seed give byte-identical output") {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  const std::string cfg =
      R"({"command":"trajectories","model":{"name":"example2"},"trajectories":{"psi0":"e","n_traj":100,"t_max":1,"seed":5},"output":"tr"})";
  REQUIRE(run_with(a, cfg, {"--threads", "1"}) == kOk);
  REQUIRE(run_with(b, cfg, {"--threads", "3"}) == kOk);
  CHECK(slurp(a / "tr_trajectories.csv") == slurp(b / "tr_trajectories.csv"));
  CHECK(slurp(a / "tr_jumps.csv") == slurp(b / "tr_jumps.csv"));
  REQUIRE(run_with(b, cfg, {"--seed", "6"}) == kOk);
  CHECK(slurp(a / "tr_jumps.csv") != slurp(b / "tr_jumps.csv"));
  CHECK(slurp(b / "tr_jumps.csv").find("# override: seed=6") != std::string::npos);

  const std::string dyn =
      R"({"command":"dynamics","model":{"name":"example3","levels":2},"dynamics":{"rho0":"basis:1","t_max":2,"n_times":11},"output":"dy"})";
  REQUIRE(run_with(a, dyn) == kOk);
  REQUIRE(run_with(b, dyn) == kOk);
  CHECK(slurp(a / "dy_dynamics.csv") == slurp(b / "dy_dynamics.csv"));
  CHECK(slurp(a / "dy_dynamics.csv").find("time,trace,purity,n_a,n_b,pop_0") != std::string::npos);
}

TEST_CASE("installed binary runs verify on the dephasing model") {
  const auto dir = scratch("binary");
  std::ofstream(dir / "v.json") << R"({"command":"verify","model":{"name":"dephasing"}})";
  const std::string cmd = std::string("\"") + LIOUEPS_CLI_PATH + "\" \"" + (dir / "v.json").string() + "\" > \"" +
                          (dir / "log.txt").string() + "\" 2>&1";
  CHECK(std::system(cmd.c_str()) == 0);
  CHECK(slurp(dir / "log.txt").find("all checks passed") != std::string::npos);
}
