#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ag/model/controls.hpp"
#include "ag/model/game.hpp"

namespace ag {

// Bad configuration text or values. The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
  std::string preset = "lq";          // lq | mean-field | common-noise | tanh-coupled
  std::string variant = "heterogeneous";  // symmetric | heterogeneous (identical costs for common noise)
  double spread = 1.0;
  int players = 2;
  double horizon = 1.0;
  int steps = 50;
  int paths = 10000;
  std::uint64_t seed = 1;
  int threads = 0;  // 0 keeps the default
  // Per-player coefficient overrides: key -> number or array of length N.
  nlohmann::json params = nlohmann::json::object();
  // Control profile: shape name -> number or array of length N.
  nlohmann::json control = nlohmann::json::object();
  std::vector<std::string> directions{"one", "ramp", "sine", "half"};
  std::string method = "Z-ORACLE";  // asymmetry route
  std::vector<double> fd_eps{1e-2, 5e-3, 2.5e-3};
  int max_pairs = 0;                 // cross-check pair limit, 0 = all
  std::vector<int> scaling_players{2, 4, 8, 16};
  int quadrature_order = 8;
  int deviations = 8;
  std::vector<std::string> family{"one", "ramp", "sine"};
  std::string out = "out";
  bool allow_long = false;
  bool export_paths = false;

  void validate() const;
};

// Parses JSON text. Syntax errors report line and column, value errors the key.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Canonical form: every key, sorted.
nlohmann::json to_json(const ExperimentConfig& c);
std::string canonical_text(const ExperimentConfig& c);

// Game for the configured preset and player count.
GameWithLedger build_game(const ExperimentConfig& c);
GameWithLedger build_game(const ExperimentConfig& c, int players);
ControlProfile build_control(const ExperimentConfig& c, int players);
std::vector<Shape> direction_shapes(const ExperimentConfig& c);

// Q_i and G_i of the deviation costs (lq and common-noise presets only).
bool deviation_weights(const ExperimentConfig& c, int players, Eigen::VectorXd& Q, Eigen::VectorXd& G);
// True when every player has the same cost coefficients.
bool identical_costs(const ExperimentConfig& c, int players);

}  // namespace ag
