#include "doctest.h"

#include <clocale>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ag/app/config.hpp"
#include "ag/app/run.hpp"

using namespace ag;
namespace fs = std::filesystem;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("alpha_games_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "alpha-games");
  std::vector<const char*> argv;
  for (auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_SUITE("app") {

TEST_CASE("config errors name the line or the key") {
  std::string e = error_of("{\n  \"players\": 3,\n  \"paths\": ,\n}");
  CHECK(e.find("line 3") != std::string::npos);
  CHECK(error_of(R"({"player": 3})").find("'player': unknown key") != std::string::npos);
  CHECK(error_of(R"({"players": 3, "params": {"Q": [1, 2]}})").find("'params.Q': array has 2 entries, need 3") !=
        std::string::npos);
  CHECK(error_of(R"({"players": "three"})").find("'players'") != std::string::npos);
  CHECK(error_of(R"({"preset": "cournot"})").find("unknown preset") != std::string::npos);
  CHECK(error_of(R"({"preset": "lq", "params": {"kappa": 1}})").find("'params.kappa'") != std::string::npos);
  CHECK(error_of(R"({"directions": ["one", "wave"]})").find("unknown shape 'wave'") != std::string::npos);
  CHECK(error_of(R"({"method": "SENS"})").find("'method'") != std::string::npos);
  CHECK(error_of(R"({"fd_eps": [0.1, 0.05, 0.02, 0.01]})").find("'fd_eps'") != std::string::npos);
  CHECK(error_of(R"({"paths": 10})").find("'paths'") != std::string::npos);
  CHECK(error_of(R"({"scaling_players": [4]})").find("'scaling_players'") != std::string::npos);
  CHECK(error_of("[1, 2]").find("top level") != std::string::npos);
  CHECK(error_of(R"({"preset": "lq", "params": {"R": -1}})").find("config params") != std::string::npos);
  CHECK(error_of(R"({"preset": "lq", "players": 2, "params": {"Q": [1, 2]}, "control": {"sine": 0.1}})") == "");
}

TEST_CASE("canonical form is a fixed point") {
  ExperimentConfig c = parse_config(
      R"({"preset": "tanh-coupled", "players": 3, "control": {"one": [0.1, 0.2, 0.3]}, "seed": 9, "fd_eps": [0.01]})");
  CHECK(c.variant == "gentle");
  const std::string once = canonical_text(c);
  const std::string twice = canonical_text(parse_config(once));
  CHECK(once == twice);
  CHECK(to_json(c)["seed"] == 9);
}

TEST_CASE("preset builders follow the config") {
  ExperimentConfig c = parse_config(R"({"preset": "lq", "variant": "symmetric", "players": 3, "params": {"A": [-0.5, -0.2, 0.1]}})");
  CHECK(identical_costs(c, 3));
  GameWithLedger g = build_game(c);
  CHECK(g.spec.n_players == 3);
  Eigen::VectorXd Q, G;
  CHECK(deviation_weights(c, 3, Q, G));
  CHECK(Q.size() == 3);
  c.variant = "heterogeneous";
  CHECK_FALSE(identical_costs(c, 3));
  ExperimentConfig t = parse_config(R"({"preset": "tanh-coupled"})");
  CHECK_FALSE(deviation_weights(t, 3, Q, G));
  ControlProfile u = build_control(parse_config(R"({"players": 2, "control": {"one": [0.5, -0.5], "ramp": 1}})"), 2);
  CHECK(u.coef(1, Shape::one) == -0.5);
  CHECK(u.coef(0, Shape::ramp) == 1.0);
}

TEST_CASE("CSV numbers do not depend on the locale") {
  CHECK(csv_number(0.5) == "0.5");
  CHECK(csv_number(0.1) == "0.10000000000000001");
  CHECK(csv_number(std::nan("")) == "nan");
  CHECK(csv_number(-INFINITY) == "-inf");
  if (std::setlocale(LC_NUMERIC, "de_DE.UTF-8")) {
    CHECK(csv_number(2.25) == "2.25");
    std::setlocale(LC_NUMERIC, "C");
  }
}

TEST_CASE("reports are reproducible across runs and thread counts") {
  ExperimentConfig c = parse_config(
      R"({"preset": "tanh-coupled", "players": 3, "steps": 10, "paths": 1100, "control": {"one": 0.2}, "directions": ["one", "sine"]})");
  c.threads = 1;
  RunReport a = run("alpha", c);
  c.threads = 2;
  RunReport b = run("alpha", c);
  CHECK(a.numerics().dump() == b.numerics().dump());
  CHECK(a.runtime["threads"] == 1);
  CHECK(b.runtime["threads"] == 2);
  CHECK_FALSE(a.numerics()["config"].contains("threads"));
  CHECK_THROWS_AS(run("optimize", c), ConfigError);
}

TEST_CASE("command line exit codes and outputs") {
  fs::path dir = scratch("cli");
  fs::path cfg = dir / "smoke.json";
  std::ofstream(cfg) << R"({"preset": "lq", "players": 2, "steps": 20, "paths": 1000})";
  fs::path out = dir / "out";

  CHECK(cli({"simulate", "--config", cfg.string(), "--out", out.string(), "--seed", "4"}) == 0);
  REQUIRE(fs::exists(out / "report.json"));
  nlohmann::json rep = nlohmann::json::parse(read(out / "report.json"));
  CHECK(rep["config"]["seed"] == 4);
  CHECK(rep["passed"] == true);
  CHECK(fs::exists(out / "tables" / "costs.csv"));
  std::string csv = read(out / "tables" / "costs.csv");
  CHECK(csv.find(',') < csv.find('\n'));

  // flags override the file
  CHECK(cli({"simulate", "--config", cfg.string(), "--out", out.string(), "--players", "3", "--paths", "500"}) == 0);
  rep = nlohmann::json::parse(read(out / "report.json"));
  CHECK(rep["config"]["players"] == 3);
  CHECK(rep["config"]["paths"] == 500);

  // failed acceptance check: the heterogeneous LQ asymmetry does not decay
  fs::path sc = dir / "scaling.json";
  std::ofstream(sc) << R"({"preset": "lq", "steps": 5, "paths": 300, "scaling_players": [2, 4], "directions": ["one"]})";
  CHECK(cli({"scaling", "--config", sc.string(), "--out", (dir / "sc").string()}) == 1);

  fs::path bad = dir / "bad.json";
  std::ofstream(bad) << R"({"preset": "lq", "paths": 10})";
  CHECK(cli({"simulate", "--config", bad.string(), "--out", out.string()}) == 2);
  CHECK(cli({"simulate", "--config", (dir / "missing.json").string()}) == 2);
  CHECK(cli({"simulate", "--config", cfg.string(), "--paths", "50"}) == 2);
  CHECK(cli({"simulate"}) == 2);
  CHECK(cli({"teleport", "--config", cfg.string()}) == 2);
  // long runs need an explicit flag
  CHECK(cli({"cross-check", "--config", cfg.string(), "--players", "16", "--paths", "400000", "--steps", "200"}) == 2);
  fs::remove_all(dir);
}

}
