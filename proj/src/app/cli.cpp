#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "ag/app/run.hpp"

namespace ag {

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"alpha-games: asymmetry and potential checks for stochastic differential games"};
  app.require_subcommand(1);
  std::string config;
  std::uint64_t seed = 0;
  int paths = 0, steps = 0, players = 0, threads = 0;
  std::string out;
  bool allow_long = false;
  for (const auto& name : subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "JSON config file")->required();
    sub->add_option("--seed", seed, "base seed");
    sub->add_option("--paths", paths, "Monte Carlo paths");
    sub->add_option("--steps", steps, "time steps");
    sub->add_option("--players", players, "number of players");
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads");
    sub->add_flag("--allow-long", allow_long, "run even when the estimate exceeds 10 minutes");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  CLI::App* sub = app.get_subcommands().front();
  try {
    ExperimentConfig c = load_config(config);
    if (sub->count("--seed")) c.seed = seed;
    if (sub->count("--paths")) c.paths = paths;
    if (sub->count("--steps")) c.steps = steps;
    if (sub->count("--players")) c.players = players;
    if (sub->count("--out")) c.out = out;
    if (sub->count("--threads")) c.threads = threads;
    if (allow_long) c.allow_long = true;
    c.validate();
    const double est = estimate_seconds(name, c);
    if (est > 600.0 && !c.allow_long) {
      std::cerr << "estimated run time " << static_cast<long>(est)
                << " s exceeds 10 minutes; pass --allow-long to run anyway\n";
      return 2;
    }
    RunReport r = run(name, c);
    write_report(r, c.out);
    for (const auto& ch : r.checks)
      std::cout << (ch.passed ? "PASS " : "FAIL ") << ch.name << " value=" << ch.value
                << " threshold=" << ch.threshold << (ch.detail.empty() ? "" : " (" + ch.detail + ")") << "\n";
    std::cout << "report written to " << c.out << "/report.json\n";
    return r.passed() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ag
