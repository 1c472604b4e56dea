#include "ag/app/config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "ag/derivatives/derivatives.hpp"
#include "ag/model/presets.hpp"

namespace ag {

using nlohmann::json;

namespace {

const std::set<std::string> kPresets{"lq", "mean-field", "common-noise", "tanh-coupled"};

const std::map<std::string, std::set<std::string>> kVariants{
    {"lq", {"symmetric", "heterogeneous"}},
    {"mean-field", {"symmetric", "heterogeneous"}},
    {"common-noise", {"identical-costs", "heterogeneous"}},
    {"tanh-coupled", {"gentle"}},
};

// Per-player keys; scalars listed separately.
const std::map<std::string, std::set<std::string>> kVectorKeys{
    {"lq", {"A", "Abar", "B", "b", "C", "Cbar", "D", "sigma", "Q", "R", "G", "x0_mean", "x0_std"}},
    {"mean-field", {"a", "theta", "B", "s", "zeta", "r", "kappa", "gamma", "x0_mean", "x0_std"}},
    {"common-noise", {"bb", "sigma", "Q", "R", "G", "x0_mean", "x0_std"}},
    {"tanh-coupled", {"kappa", "beta", "B", "eta", "vs", "gam", "zeta", "D", "omega", "q", "r", "e", "c", "G", "tau",
                      "x0_mean", "x0_std"}},
};
const std::map<std::string, std::set<std::string>> kScalarKeys{
    {"lq", {}}, {"mean-field", {"q", "G"}}, {"common-noise", {}}, {"tanh-coupled", {"control_bound"}}};

const std::set<int> kQuadrature{1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 16, 20};

// 1-based line and column of a byte offset.
std::string position(const std::string& text, size_t byte) {
  size_t line = 1, col = 1;
  for (size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

template <class T>
T take(const json& j, const std::string& key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("config key '" + key + "': " + e.what());
  }
}

bool is_shape(const std::string& s) {
  for (int k = 0; k < kShapes; ++k)
    if (shape_name(static_cast<Shape>(k)) == s) return true;
  return false;
}

Eigen::VectorXd per_player(const json& v, int n, const std::string& key) {
  if (v.is_number()) return Eigen::VectorXd::Constant(n, v.get<double>());
  if (!v.is_array()) throw ConfigError("config key '" + key + "': expected a number or an array");
  if (static_cast<int>(v.size()) != n)
    throw ConfigError("config key '" + key + "': array has " + std::to_string(v.size()) + " entries, need " +
                      std::to_string(n));
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) {
    if (!v[i].is_number()) throw ConfigError("config key '" + key + "': entries must be numbers");
    out[i] = v[i].get<double>();
  }
  return out;
}

double scalar(const json& v, const std::string& key) {
  if (!v.is_number()) throw ConfigError("config key '" + key + "': expected a number");
  return v.get<double>();
}

template <class P>
void apply_vectors(P& p, const json& params, int n, const std::map<std::string, Eigen::VectorXd P::*>& fields) {
  for (const auto& [key, member] : fields)
    if (params.contains(key)) p.*member = per_player(params.at(key), n, "params." + key);
}

}  // namespace

namespace {
GameWithLedger make_game(const ExperimentConfig& c, int n);
}

void ExperimentConfig::validate() const {
  if (!kPresets.count(preset)) throw ConfigError("config key 'preset': unknown preset '" + preset + "'");
  if (!kVariants.at(preset).count(variant))
    throw ConfigError("config key 'variant': '" + variant + "' is not a variant of " + preset);
  if (!(spread >= 0)) throw ConfigError("config key 'spread': must be nonnegative");
  if (players < 1 || players > 64) throw ConfigError("config key 'players': need 1 <= players <= 64");
  if (!(horizon > 0)) throw ConfigError("config key 'horizon': must be positive");
  if (steps < 2) throw ConfigError("config key 'steps': need at least 2");
  if (paths < 100) throw ConfigError("config key 'paths': need at least 100");
  if (threads < 0) throw ConfigError("config key 'threads': must be nonnegative");
  if (!params.is_object()) throw ConfigError("config key 'params': expected an object");
  for (const auto& [k, v] : params.items()) {
    const bool vec = kVectorKeys.at(preset).count(k) > 0, sc = kScalarKeys.at(preset).count(k) > 0;
    if (!vec && !sc) throw ConfigError("config key 'params." + k + "': not a parameter of " + preset);
    if (sc) scalar(v, "params." + k);
    if (vec) per_player(v, players, "params." + k);
  }
  if (!control.is_object()) throw ConfigError("config key 'control': expected an object");
  for (const auto& [k, v] : control.items()) {
    if (k != "loading" && !is_shape(k)) throw ConfigError("config key 'control." + k + "': unknown control shape");
    per_player(v, players, "control." + k);
  }
  if (directions.empty()) throw ConfigError("config key 'directions': need at least one shape");
  for (const auto& s : directions)
    if (!is_shape(s)) throw ConfigError("config key 'directions': unknown shape '" + s + "'");
  if (family.empty()) throw ConfigError("config key 'family': need at least one shape");
  for (const auto& s : family)
    if (!is_shape(s)) throw ConfigError("config key 'family': unknown shape '" + s + "'");
  try {
    method_from_name(method);
  } catch (const std::invalid_argument&) {
    throw ConfigError("config key 'method': unknown method '" + method + "' (FD, BSDE or Z-ORACLE)");
  }
  if (method == "SENS") throw ConfigError("config key 'method': SENS has no second-order asymmetry route");
  try {
    richardson_weights(fd_eps);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config key 'fd_eps': ") + e.what());
  }
  if (max_pairs < 0) throw ConfigError("config key 'max_pairs': must be nonnegative");
  if (scaling_players.size() < 2) throw ConfigError("config key 'scaling_players': need at least two sizes");
  for (int n : scaling_players)
    if (n < 2 || n > 64) throw ConfigError("config key 'scaling_players': sizes must lie in [2, 64]");
  if (!kQuadrature.count(quadrature_order))
    throw ConfigError("config key 'quadrature_order': must be 1-8, 10, 12, 16 or 20");
  if (deviations < 1) throw ConfigError("config key 'deviations': need at least one");
  if (out.empty()) throw ConfigError("config key 'out': empty output directory");
  // parameter values are checked by the preset builders
  make_game(*this, players);
  build_control(*this, players);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + position(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");
  ExperimentConfig c;
  static const std::set<std::string> known{
      "preset", "variant", "spread", "players", "horizon", "steps", "paths", "seed", "threads",
      "params", "control", "directions", "method", "fd_eps", "max_pairs", "scaling_players",
      "quadrature_order", "deviations", "family", "out", "allow_long", "export_paths"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("config key '" + k + "': unknown key");
  if (j.contains("preset")) c.preset = take<std::string>(j, "preset");
  // variant default depends on the preset
  if (c.preset == "tanh-coupled") c.variant = "gentle";
  if (j.contains("variant")) c.variant = take<std::string>(j, "variant");
  if (j.contains("spread")) c.spread = take<double>(j, "spread");
  if (j.contains("players")) c.players = take<int>(j, "players");
  if (j.contains("horizon")) c.horizon = take<double>(j, "horizon");
  if (j.contains("steps")) c.steps = take<int>(j, "steps");
  if (j.contains("paths")) c.paths = take<int>(j, "paths");
  if (j.contains("seed")) c.seed = take<std::uint64_t>(j, "seed");
  if (j.contains("threads")) c.threads = take<int>(j, "threads");
  if (j.contains("params")) c.params = j.at("params");
  if (j.contains("control")) c.control = j.at("control");
  if (j.contains("directions")) c.directions = take<std::vector<std::string>>(j, "directions");
  if (j.contains("method")) c.method = take<std::string>(j, "method");
  if (j.contains("fd_eps")) c.fd_eps = take<std::vector<double>>(j, "fd_eps");
  if (j.contains("max_pairs")) c.max_pairs = take<int>(j, "max_pairs");
  if (j.contains("scaling_players")) c.scaling_players = take<std::vector<int>>(j, "scaling_players");
  if (j.contains("quadrature_order")) c.quadrature_order = take<int>(j, "quadrature_order");
  if (j.contains("deviations")) c.deviations = take<int>(j, "deviations");
  if (j.contains("family")) c.family = take<std::vector<std::string>>(j, "family");
  if (j.contains("out")) c.out = take<std::string>(j, "out");
  if (j.contains("allow_long")) c.allow_long = take<bool>(j, "allow_long");
  if (j.contains("export_paths")) c.export_paths = take<bool>(j, "export_paths");
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["variant"] = c.variant;
  j["spread"] = c.spread;
  j["players"] = c.players;
  j["horizon"] = c.horizon;
  j["steps"] = c.steps;
  j["paths"] = c.paths;
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["params"] = c.params;
  j["control"] = c.control;
  j["directions"] = c.directions;
  j["method"] = c.method;
  j["fd_eps"] = c.fd_eps;
  j["max_pairs"] = c.max_pairs;
  j["scaling_players"] = c.scaling_players;
  j["quadrature_order"] = c.quadrature_order;
  j["deviations"] = c.deviations;
  j["family"] = c.family;
  j["out"] = c.out;
  j["allow_long"] = c.allow_long;
  j["export_paths"] = c.export_paths;
  return j;
}

std::string canonical_text(const ExperimentConfig& c) { return to_json(c).dump(2); }

GameWithLedger build_game(const ExperimentConfig& c) { return build_game(c, c.players); }

namespace {

LqParams lq_params(const ExperimentConfig& c, int n) {
  LqParams p = c.variant == "symmetric" ? LqParams::symmetric(n) : LqParams::heterogeneous(n, c.spread);
  p.horizon = c.horizon;
  apply_vectors<LqParams>(p, c.params, n,
                          {{"A", &LqParams::A}, {"Abar", &LqParams::Abar}, {"B", &LqParams::B},
                           {"b", &LqParams::b}, {"C", &LqParams::C}, {"Cbar", &LqParams::Cbar},
                           {"D", &LqParams::D}, {"sigma", &LqParams::sigma}, {"Q", &LqParams::Q},
                           {"R", &LqParams::R}, {"G", &LqParams::G}, {"x0_mean", &LqParams::x0_mean},
                           {"x0_std", &LqParams::x0_std}});
  return p;
}

MeanFieldParams mean_field_params(const ExperimentConfig& c, int n) {
  MeanFieldParams p = MeanFieldParams::heterogeneous(n, c.variant == "symmetric" ? 0.0 : c.spread);
  p.horizon = c.horizon;
  apply_vectors<MeanFieldParams>(
      p, c.params, n,
      {{"a", &MeanFieldParams::a}, {"theta", &MeanFieldParams::theta}, {"B", &MeanFieldParams::B},
       {"s", &MeanFieldParams::s}, {"zeta", &MeanFieldParams::zeta}, {"r", &MeanFieldParams::r},
       {"kappa", &MeanFieldParams::kappa}, {"gamma", &MeanFieldParams::gamma},
       {"x0_mean", &MeanFieldParams::x0_mean}, {"x0_std", &MeanFieldParams::x0_std}});
  if (c.params.contains("q")) p.q = scalar(c.params.at("q"), "params.q");
  if (c.params.contains("G")) p.G = scalar(c.params.at("G"), "params.G");
  return p;
}

CommonNoiseParams common_noise_params(const ExperimentConfig& c, int n) {
  CommonNoiseParams p = c.variant == "identical-costs" ? CommonNoiseParams::identical_costs(n)
                                                       : CommonNoiseParams::heterogeneous(n, c.spread);
  p.horizon = c.horizon;
  apply_vectors<CommonNoiseParams>(
      p, c.params, n,
      {{"bb", &CommonNoiseParams::bb}, {"sigma", &CommonNoiseParams::sigma}, {"Q", &CommonNoiseParams::Q},
       {"R", &CommonNoiseParams::R}, {"G", &CommonNoiseParams::G}, {"x0_mean", &CommonNoiseParams::x0_mean},
       {"x0_std", &CommonNoiseParams::x0_std}});
  return p;
}

TanhParams tanh_params(const ExperimentConfig& c, int n) {
  TanhParams p = TanhParams::gentle(n);
  p.horizon = c.horizon;
  apply_vectors<TanhParams>(
      p, c.params, n,
      {{"kappa", &TanhParams::kappa}, {"beta", &TanhParams::beta}, {"B", &TanhParams::B},
       {"eta", &TanhParams::eta}, {"vs", &TanhParams::vs}, {"gam", &TanhParams::gam},
       {"zeta", &TanhParams::zeta}, {"D", &TanhParams::D}, {"omega", &TanhParams::omega},
       {"q", &TanhParams::q}, {"r", &TanhParams::r}, {"e", &TanhParams::e}, {"c", &TanhParams::c},
       {"G", &TanhParams::G}, {"tau", &TanhParams::tau}, {"x0_mean", &TanhParams::x0_mean},
       {"x0_std", &TanhParams::x0_std}});
  if (c.params.contains("control_bound")) p.control_bound = scalar(c.params.at("control_bound"), "params.control_bound");
  return p;
}

bool flat(const Eigen::VectorXd& v) { return v.size() == 0 || (v.array() == v[0]).all(); }

}  // namespace

namespace {

GameWithLedger make_game(const ExperimentConfig& c, int n) {
  try {
    if (c.preset == "lq") return build_lq_game(lq_params(c, n));
    if (c.preset == "mean-field") return build_mean_field_game(mean_field_params(c, n));
    if (c.preset == "common-noise") return build_common_noise_game(common_noise_params(c, n));
    return build_tanh_game(tanh_params(c, n));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config params: ") + e.what());
  }
}

}  // namespace

GameWithLedger build_game(const ExperimentConfig& c, int n) {
  c.validate();
  return make_game(c, n);
}

bool deviation_weights(const ExperimentConfig& c, int n, Eigen::VectorXd& Q, Eigen::VectorXd& G) {
  if (c.preset == "lq") {
    LqParams p = lq_params(c, n);
    Q = p.Q, G = p.G;
    return true;
  }
  if (c.preset == "common-noise") {
    CommonNoiseParams p = common_noise_params(c, n);
    Q = p.Q, G = p.G;
    return true;
  }
  return false;
}

bool identical_costs(const ExperimentConfig& c, int n) {
  if (c.preset == "lq") {
    LqParams p = lq_params(c, n);
    return flat(p.Q) && flat(p.R) && flat(p.G);
  }
  if (c.preset == "mean-field") {
    MeanFieldParams p = mean_field_params(c, n);
    return flat(p.r) && flat(p.kappa) && flat(p.gamma);
  }
  if (c.preset == "common-noise") {
    CommonNoiseParams p = common_noise_params(c, n);
    return flat(p.Q) && flat(p.R) && flat(p.G);
  }
  TanhParams p = tanh_params(c, n);
  return flat(p.q) && flat(p.r) && flat(p.e) && flat(p.c) && flat(p.G) && flat(p.tau);
}

ControlProfile build_control(const ExperimentConfig& c, int n) {
  ControlProfile u = ControlProfile::zero(n, c.horizon);
  for (const auto& [k, v] : c.control.items()) {
    Eigen::VectorXd a = per_player(v, n, "control." + k);
    if (k == "loading") {
      // each player loads on its own noise
      for (int i = 0; i < n; ++i)
        if (a[i] != 0.0) u.set_loading(i, i, a[i]);
      continue;
    }
    Shape s = shape_from_name(k);
    for (int i = 0; i < n; ++i) u.coef(i, s) += a[i];
  }
  return u;
}

std::vector<Shape> direction_shapes(const ExperimentConfig& c) {
  std::vector<Shape> out;
  for (const auto& s : c.directions) out.push_back(shape_from_name(s));
  return out;
}

}  // namespace ag
