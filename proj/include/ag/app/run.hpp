#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "ag/app/config.hpp"

namespace ag {

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0, threshold = 0.0;
  std::string detail;
};

// CSV table; numbers are written with %.17g in the classic locale.
struct Table {
  std::string name;  // file stem under tables/
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row);
};

std::string csv_number(double v);

struct RunReport {
  std::string subcommand;
  nlohmann::json config;
  nlohmann::json results = nlohmann::json::object();
  nlohmann::json runtime = nlohmann::json::object();  // timing and threads, not reproducible
  std::vector<Check> checks;
  std::vector<Table> tables;

  void check(const std::string& name, bool passed, double value, double threshold, const std::string& detail = "");
  bool passed() const;
  const Check* find(const std::string& name) const;
  // Everything except the runtime section.
  nlohmann::json numerics() const;
  nlohmann::json to_json() const;
};

const std::vector<std::string>& subcommands();

// Rough wall-clock estimate on one core, used to refuse very long runs.
double estimate_seconds(const std::string& subcommand, const ExperimentConfig& c);

// Throws ConfigError for unknown subcommands or bad configs.
RunReport run(const std::string& subcommand, const ExperimentConfig& c);

// report.json plus tables/<name>.csv under dir.
void write_report(const RunReport& r, const std::string& dir);

// Command-line entry: returns the process exit code (0 pass, 1 failed
// checks, 2 config error).
int run_cli(int argc, const char* const* argv);

}  // namespace ag
