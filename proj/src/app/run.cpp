#include "ag/app/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ag/alpha/asymmetry.hpp"
#include "ag/alpha/bounds.hpp"
#include "ag/alpha/potential.hpp"
#include "ag/bsde/adjoint.hpp"
#include "ag/derivatives/derivatives.hpp"
#include "ag/model/noise.hpp"
#include "ag/model/validate.hpp"
#include "ag/sim/paths.hpp"
#include "ag/sim/sensitivity.hpp"
#include "ag/util/parallel.hpp"

#ifndef AG_BUILD_ID
#define AG_BUILD_ID "unknown"
#endif

namespace ag {

using nlohmann::json;

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  // snprintf with %g is locale dependent only for the decimal point
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  std::replace(s.begin(), s.end(), ',', '.');
  return s;
}

void Table::add(std::vector<std::string> row) {
  if (row.size() != header.size()) throw std::logic_error("table " + name + ": row width does not match header");
  rows.push_back(std::move(row));
}

void RunReport::check(const std::string& name, bool passed, double value, double threshold,
                      const std::string& detail) {
  checks.push_back({name, passed, value, threshold, detail});
}

bool RunReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* RunReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

json RunReport::numerics() const {
  json j;
  j["build_id"] = AG_BUILD_ID;
  j["subcommand"] = subcommand;
  j["config"] = config;
  j["seeds"] = {{"base", config.value("seed", 0)}};
  j["results"] = results;
  json cs = json::array();
  for (const auto& c : checks)
    cs.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"threshold", c.threshold},
                  {"detail", c.detail}});
  j["checks"] = cs;
  j["passed"] = passed();
  return j;
}

json RunReport::to_json() const {
  json j = numerics();
  j["runtime"] = runtime;
  return j;
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> s{"simulate", "deriv",     "cross-check", "alpha",
                                          "bound",    "scaling",   "potential",   "nash-gap"};
  return s;
}

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    out.push_back(row);
  }
  return out;
}

json estimate_json(const Estimate& e) { return {{"value", e.value}, {"se", e.se}}; }

std::string num(double v) { return csv_number(v); }
std::string num(int v) { return std::to_string(v); }

Estimate column(const Eigen::MatrixXd& m, int c) {
  std::vector<double> v(m.rows());
  for (Eigen::Index p = 0; p < m.rows(); ++p) v[p] = m(p, c);
  return mean_se(v);
}

json ledger_json(const ConstantLedger& L) {
  return {{"L_b", L.L_b},         {"L_y_b", L.L_y_b},           {"L_sigma", L.L_sigma},
          {"L_y_sigma", L.L_y_sigma}, {"L_y_bsigma", L.L_y_bsigma}, {"sampled_gap_norms", L.sampled}};
}

// E|xi|^p for a normal initial state, p in {2, 4}.
double normal_moment(double m, double s, double p) {
  if (p == 2.0) return m * m + s * s;
  if (p == 4.0) return m * m * m * m + 6.0 * m * m * s * s + 3.0 * s * s * s * s;
  throw std::invalid_argument("normal_moment: p must be 2 or 4");
}

double eps_min(const ExperimentConfig& c) { return *std::min_element(c.fd_eps.begin(), c.fd_eps.end()); }

struct Setup {
  GameWithLedger game;
  ControlProfile control;
  TimeGrid grid;
  NoiseBundle noise;
};

Setup setup(const ExperimentConfig& c, int players, std::uint64_t seed) {
  Setup s;
  s.game = build_game(c, players);
  s.control = build_control(c, players);
  s.grid = TimeGrid(c.steps, c.horizon);
  s.noise = make_noise(s.game.spec, s.grid, seed, c.paths);
  return s;
}

// ---------------------------------------------------------------- simulate

void run_simulate(const ExperimentConfig& c, RunReport& r) {
  Setup s = setup(c, c.players, c.seed);
  const GameSpec& spec = s.game.spec;
  const ConstantLedger& L = s.game.ledger;
  const int n = spec.n_players;

  ValidationReport vr = validate_game(spec, L, s.game.box);
  const ValidationEntry* worst = vr.worst();
  r.check("ledger_validation", vr.passed, worst ? worst->worst_ratio : 0.0, 1.0, worst ? worst->tag : "");
  PartialCheck pc = check_partials(spec, s.game.box);
  r.check("analytic_partials", pc.worst_rel_error <= 1e-5, pc.worst_rel_error, 1e-5, pc.where);
  r.results["ledger"] = ledger_json(L);

  PathEnsemble ens = simulate_paths(spec, s.control, s.grid, s.noise);
  std::vector<Estimate> cost = cost_value(spec, ens);
  Table tc{"costs", {"player", "value", "se"}, {}};
  json jc = json::array();
  for (int i = 0; i < n; ++i) {
    tc.add({num(i), num(cost[i].value), num(cost[i].se)});
    jc.push_back(estimate_json(cost[i]));
  }
  r.results["costs"] = jc;
  r.tables.push_back(tc);

  Table tm{"moments", {"p", "player", "empirical", "empirical_se", "bound"}, {}};
  Table ts{"sensitivity_moments", {"p", "h", "player", "empirical", "bound"}, {}};
  const Shape dshape = direction_shapes(c).front();
  std::vector<double> worst_state(2, 0.0), worst_sens(2, 0.0);
  std::vector<SensitivityEnsemble> Ys;
  for (int h = 0; h < n; ++h)
    Ys.push_back(propagate_sensitivity(spec, ens, h, ControlProfile::direction(n, c.horizon, h, dshape), s.noise));
  json jm = json::array();
  for (int q = 0; q < 2; ++q) {
    const double p = q == 0 ? 2.0 : 4.0;
    std::vector<double> xi(n), un(n, 0.0);
    for (int i = 0; i < n; ++i) {
      xi[i] = normal_moment(spec.initial.mean[i], spec.initial.stdev[i], p);
      double acc = 0.0;
      for (int path = 0; path < ens.n_paths; ++path)
        for (int k = 0; k < s.grid.n_steps; ++k) acc += std::pow(std::abs(ens.u(path, k)[i]), p) * s.grid.dt;
      un[i] = acc / ens.n_paths;
    }
    MomentConstants mc = moment_bound_constants(L, p, xi, un, c.horizon);
    json row = {{"p", p}, {"I1", mc.I1}, {"I2", mc.I2}, {"CX", mc.CX}, {"I0", mc.I0}};
    json emp = json::array();
    for (int i = 0; i < n; ++i) {
      Estimate e = empirical_moment(ens, i, p);
      emp.push_back(estimate_json(e));
      tm.add({num(p), num(i), num(e.value), num(e.se), num(mc.CX[i])});
      worst_state[q] = std::max(worst_state[q], e.value / mc.CX[i]);
    }
    row["empirical"] = emp;
    double dnorm = 0.0;
    for (int k = 0; k < s.grid.n_steps; ++k)
      dnorm += std::pow(std::abs(shape_value(dshape, s.grid.t(k), c.horizon)), p) * s.grid.dt;
    json sens = json::array();
    for (int h = 0; h < n; ++h)
      for (int i = 0; i < n; ++i) {
        double best = 0.0;
        for (int k = 0; k <= s.grid.n_steps; ++k) {
          double acc = 0.0;
          for (int path = 0; path < ens.n_paths; ++path) acc += std::pow(std::abs(Ys[h].y(path, k)[i]), p);
          best = std::max(best, acc / ens.n_paths);
        }
        SensitivityBound sb = sensitivity_moment_bound(L, p, dnorm, c.horizon, h, i);
        ts.add({num(p), num(h), num(i), num(best), num(sb.value)});
        sens.push_back({{"h", h}, {"i", i}, {"empirical", best}, {"bound", sb.value}});
        worst_sens[q] = std::max(worst_sens[q], sb.value > 0 ? best / sb.value : (best > 0 ? 1e300 : 0.0));
      }
    row["sensitivity"] = sens;
    jm.push_back(row);
    const std::string tag = "p" + std::to_string(static_cast<int>(p));
    r.check("state_moment_" + tag, worst_state[q] <= 1.0, worst_state[q], 1.0, "largest empirical / C_X");
    r.check("sensitivity_moment_" + tag, worst_sens[q] <= 1.0, worst_sens[q], 1.0, "largest empirical / bound");
  }
  r.results["moments"] = jm;
  r.tables.push_back(tm);
  r.tables.push_back(ts);

  if (c.export_paths) {
    Table tp{"paths", {"path", "step", "t"}, {}};
    for (int i = 0; i < n; ++i) tp.header.push_back("x" + std::to_string(i));
    const int P = std::min(ens.n_paths, 50);
    for (int path = 0; path < P; ++path)
      for (int k = 0; k <= s.grid.n_steps; ++k) {
        std::vector<std::string> row{num(path), num(k), num(s.grid.t(k))};
        for (int i = 0; i < n; ++i) row.push_back(num(ens.x(path, k)[i]));
        tp.add(row);
      }
    r.tables.push_back(tp);
  }
}

// ---------------------------------------------------------------- deriv

void run_deriv(const ExperimentConfig& c, RunReport& r) {
  Setup s = setup(c, c.players, c.seed);
  const GameSpec& spec = s.game.spec;
  const int n = spec.n_players;
  const std::vector<Shape> dict = direction_shapes(c);
  const int D = static_cast<int>(dict.size());
  FdOptions fo;
  fo.eps = c.fd_eps;
  const double em = eps_min(c);

  PathEnsemble ens = simulate_paths(spec, s.control, s.grid, s.noise);
  // [h][d] -> n x N pathwise
  std::vector<std::vector<Eigen::MatrixXd>> fd(n), sens(n);
  std::vector<std::vector<ControlProfile>> dirs(n);
  for (int h = 0; h < n; ++h) {
    for (Shape sh : dict) dirs[h].push_back(ControlProfile::direction(n, c.horizon, h, sh));
    for (int d = 0; d < D; ++d) fd[h].push_back(first_fd_pathwise(spec, s.control, h, dirs[h][d], s.noise, fo));
    sens[h] = first_sens_streaming(spec, ens, h, dirs[h], s.noise);
  }
  // [i][h][d]
  std::vector<std::vector<std::vector<Estimate>>> bsde(n, std::vector<std::vector<Estimate>>(n));
  for (int i = 0; i < n; ++i) {
    AdjointSolution adj = solve_first_adjoint(spec, ens, i, s.noise);
    BsdeGradient G = first_bsde_gradient(spec, ens, adj);
    for (int h = 0; h < n; ++h)
      for (int d = 0; d < D; ++d) bsde[i][h].push_back(mean_se(first_bsde_pathwise(G, ens, h, dirs[h][d])));
  }

  Table t{"derivatives",
          {"i", "h", "direction", "fd", "fd_se", "sens", "sens_se", "bsde", "bsde_se", "gap_sens", "tol_sens",
           "gap_bsde", "tol_bsde"},
          {}};
  double worst_s = 0.0, worst_b = 0.0;
  json rows = json::array();
  for (int i = 0; i < n; ++i)
    for (int h = 0; h < n; ++h)
      for (int d = 0; d < D; ++d) {
        Estimate f = column(fd[h][d], i), se = column(sens[h][d], i), b = bsde[i][h][d];
        const double gs = std::abs(f.value - se.value), ts = 3.0 * (f.se + se.se) + 10.0 * em;
        const double gb = std::abs(f.value - b.value), tb = 3.0 * (f.se + b.se) + 10.0 * em;
        worst_s = std::max(worst_s, gs / ts);
        worst_b = std::max(worst_b, gb / tb);
        t.add({num(i), num(h), shape_name(dict[d]), num(f.value), num(f.se), num(se.value), num(se.se), num(b.value),
               num(b.se), num(gs), num(ts), num(gb), num(tb)});
        rows.push_back({{"i", i}, {"h", h}, {"direction", shape_name(dict[d])}, {"fd", estimate_json(f)},
                        {"sens", estimate_json(se)}, {"bsde", estimate_json(b)}});
      }
  r.results["derivatives"] = rows;
  r.results["eps_min"] = em;
  r.tables.push_back(t);
  r.check("fd_vs_sens", worst_s <= 1.0, worst_s, 1.0, "largest |FD - SENS| / (3 SE sum + 10 eps_min)");
  r.check("fd_vs_bsde", worst_b <= 1.0, worst_b, 1.0, "largest |FD - BSDE| / (3 SE sum + 10 eps_min)");
}

// ---------------------------------------------------------------- cross-check

void run_cross_check(const ExperimentConfig& c, RunReport& r) {
  Setup s = setup(c, c.players, c.seed);
  const GameSpec& spec = s.game.spec;
  const int n = spec.n_players;
  if (n < 2) throw ConfigError("config key 'players': cross-check needs at least two players");
  const std::vector<Shape> dict = direction_shapes(c);
  FdOptions fo;
  fo.eps = c.fd_eps;
  const double em = eps_min(c);

  struct Combo {
    int h, l;
    Shape a, b;
  };
  std::vector<Combo> combos;
  for (int h = 0; h < n; ++h)
    for (int l = h + 1; l < n; ++l)
      for (Shape a : dict)
        for (Shape b : dict) combos.push_back({h, l, a, b});
  if (c.max_pairs > 0 && static_cast<int>(combos.size()) > c.max_pairs) combos.resize(c.max_pairs);

  PathEnsemble ens = simulate_paths(spec, s.control, s.grid, s.noise);
  std::map<int, SensitivityEnsemble> Y;
  auto sens = [&](int h, Shape sh) -> const SensitivityEnsemble& {
    const int key = h * kShapes + static_cast<int>(sh);
    auto it = Y.find(key);
    if (it == Y.end())
      it = Y.emplace(key, propagate_sensitivity(spec, ens, h, ControlProfile::direction(n, c.horizon, h, sh), s.noise))
               .first;
    return it->second;
  };
  std::vector<AdjointSolution> first;
  std::vector<SecondAdjointSolution> second;
  for (int i = 0; i < n; ++i) {
    first.push_back(solve_first_adjoint(spec, ens, i, s.noise));
    second.push_back(solve_second_adjoint(spec, ens, first.back(), s.noise));
  }

  Table t{"cross_check",
          {"i", "h", "l", "a", "b", "fd", "fd_se", "z", "z_se", "bsde", "bsde_se", "worst_ratio"},
          {}};
  double worst[3] = {0.0, 0.0, 0.0};
  json rows = json::array();
  for (const Combo& cb : combos) {
    const SensitivityEnsemble& Yh = sens(cb.h, cb.a);
    const SensitivityEnsemble& Yl = sens(cb.l, cb.b);
    Eigen::MatrixXd F = second_fd_pathwise(spec, s.control, cb.h, ControlProfile::direction(n, c.horizon, cb.h, cb.a),
                                           cb.l, ControlProfile::direction(n, c.horizon, cb.l, cb.b), s.noise, fo);
    SecondSensitivityEnsemble Z = propagate_second_sensitivity(spec, ens, Yh, Yl, s.noise);
    for (int i = 0; i < n; ++i) {
      Estimate f = column(F, i);
      Estimate z = mean_se(second_z_pathwise(spec, ens, Yh, Yl, Z, i));
      Estimate b = mean_se(second_bsde_pathwise(spec, ens, first[i], second[i], Yh, Yl));
      const double rz = std::abs(f.value - z.value) / (5.0 * (f.se + z.se) + 20.0 * em);
      const double rb = std::abs(f.value - b.value) / (5.0 * (f.se + b.se) + 20.0 * em);
      const double rzb = std::abs(z.value - b.value) / (5.0 * (z.se + b.se) + 20.0 * em);
      worst[0] = std::max(worst[0], rz);
      worst[1] = std::max(worst[1], rb);
      worst[2] = std::max(worst[2], rzb);
      t.add({num(i), num(cb.h), num(cb.l), shape_name(cb.a), shape_name(cb.b), num(f.value), num(f.se), num(z.value),
             num(z.se), num(b.value), num(b.se), num(std::max({rz, rb, rzb}))});
      rows.push_back({{"i", i}, {"h", cb.h}, {"l", cb.l}, {"a", shape_name(cb.a)}, {"b", shape_name(cb.b)},
                      {"fd", estimate_json(f)}, {"z_oracle", estimate_json(z)}, {"bsde", estimate_json(b)}});
    }
  }
  r.results["second_derivatives"] = rows;
  r.results["eps_min"] = em;
  r.tables.push_back(t);
  const char* names[3] = {"fd_vs_z_oracle", "fd_vs_bsde", "z_oracle_vs_bsde"};
  for (int q = 0; q < 3; ++q)
    r.check(names[q], worst[q] <= 1.0, worst[q], 1.0, "largest gap / (5 SE sum + 20 eps_min)");
}

// ---------------------------------------------------------------- alpha

struct AlphaRun {
  AsymmetryMatrix matrix;
  Estimate alpha_hat;
  int argmax = 0;
  BoundLedger bl;
  AlphaBound bound;
  Eigen::MatrixXd lq;  // pair bounds when defined, else empty
  double max_pair = 0.0, max_pair_se = 0.0;
  int max_i = 0, max_j = 1;
};

AlphaRun alpha_run(const ExperimentConfig& c, int players) {
  Setup s = setup(c, players, c.seed);
  const GameSpec& spec = s.game.spec;
  AsymmetryOptions opts;
  opts.fd.eps = c.fd_eps;
  AlphaRun a;
  a.matrix = asymmetry_matrix(spec, s.control, direction_shapes(c), s.noise, method_from_name(c.method), opts);
  a.alpha_hat = a.matrix.alpha(&a.argmax);
  for (const auto& p : a.matrix.pairs)
    if (p.value > a.max_pair) {
      a.max_pair = p.value;
      a.max_pair_se = p.se;
      a.max_i = p.i;
      a.max_j = p.j;
    }
  a.bl = make_bound_ledger(s.game.ledger, c.horizon, spec.drivers());
  a.bound = theoretical_alpha_bound(s.game.ledger, a.bl);
  Eigen::VectorXd Q, G;
  if (deviation_weights(c, players, Q, G)) {
    a.lq = Eigen::MatrixXd::Zero(players, players);
    for (int i = 0; i < players; ++i)
      for (int j = 0; j < players; ++j)
        if (i != j) a.lq(i, j) = lq_pair_bound(Q[i], Q[j], G[i], G[j], players, a.bl.lambda1(i, j), a.bl.C);
  }
  return a;
}

void run_alpha(const ExperimentConfig& c, RunReport& r) {
  AlphaRun a = alpha_run(c, c.players);
  const int n = c.players;
  Table t{"asymmetry", {"i", "j", "value", "se", "normalized", "normalized_se", "a", "b", "pair_bound", "lq_pair_bound"},
          {}};
  json pairs = json::array();
  double worst_zero = 0.0;
  for (const auto& p : a.matrix.pairs) {
    const double pb = a.bound.ctilde(p.i, p.j);
    const double lq = a.lq.size() ? a.lq(p.i, p.j) : std::numeric_limits<double>::quiet_NaN();
    t.add({num(p.i), num(p.j), num(p.value), num(p.se), num(p.normalized), num(p.normalized_se), shape_name(p.a),
           shape_name(p.b), num(pb), num(lq)});
    json jp = {{"i", p.i}, {"j", p.j}, {"value", p.value}, {"se", p.se}, {"normalized", p.normalized},
               {"normalized_se", p.normalized_se}, {"a", shape_name(p.a)}, {"b", shape_name(p.b)}, {"pair_bound", pb}};
    if (a.lq.size()) jp["lq_pair_bound"] = lq;
    pairs.push_back(jp);
    // zero asymmetry means |value| within 3 SE
    worst_zero = std::max(worst_zero, p.value / (3.0 * p.se + 1e-14));
  }
  r.tables.push_back(t);
  r.results["method"] = c.method;
  r.results["pairs"] = pairs;
  r.results["asymmetry"] = matrix_json(a.matrix.value);
  r.results["asymmetry_se"] = matrix_json(a.matrix.se);
  r.results["alpha_hat"] = estimate_json(a.alpha_hat);
  r.results["alpha_hat_row"] = a.argmax;
  r.results["max_pair"] = {{"i", a.max_i}, {"j", a.max_j}, {"value", a.max_pair}, {"se", a.max_pair_se}};
  r.results["bound"] = {{"alpha", a.bound.alpha},
                        {"argmax", a.bound.argmax},
                        {"C", a.bound.C},
                        {"ctilde", matrix_json(a.bound.ctilde)},
                        {"lambda1", matrix_json(a.bl.lambda1)},
                        {"apriori", a.bl.apriori},
                        {"note", a.bound.note}};
  // ordering against the bound, up to the symbolic multiplier
  r.results["alpha_hat_over_bound"] = a.bound.alpha > 0 ? a.alpha_hat.value / a.bound.alpha : 0.0;
  const bool same = identical_costs(c, n);
  r.results["identical_costs"] = same;
  if (same)
    r.check("zero_asymmetry", worst_zero <= 1.0, worst_zero, 1.0, "largest asymmetry / (3 SE)");
  else
    r.check("alpha_hat_finite", std::isfinite(a.alpha_hat.value), a.alpha_hat.value, 0.0);
}

// ---------------------------------------------------------------- bound

void run_bound(const ExperimentConfig& c, RunReport& r) {
  GameWithLedger g = build_game(c);
  const GameSpec& spec = g.spec;
  const ConstantLedger& L = g.ledger;
  const int n = spec.n_players;
  ValidationReport vr = validate_game(spec, L, g.box);
  const ValidationEntry* worst = vr.worst();
  r.check("ledger_validation", vr.passed, worst ? worst->worst_ratio : 0.0, 1.0, worst ? worst->tag : "");

  BoundLedger B = make_bound_ledger(L, c.horizon, spec.drivers());
  AlphaBound ab = theoretical_alpha_bound(L, B);
  r.results["ledger"] = ledger_json(L);
  r.results["bound_ledger"] = {{"B0_norm", B.B0_norm}, {"Pi0_norm", B.Pi0_norm}, {"drivers", B.drivers},
                               {"apriori", B.apriori}, {"C1bs", B.C1bs},         {"C2bs", B.C2bs},
                               {"lambda1", matrix_json(B.lambda1)}};
  Table tp{"bound_pairs", {"i", "j", "c0", "c1", "c2", "lambda1", "total", "no_diffusion"}, {}};
  bool finite = true;
  const bool nodiff = L.L_sigma == 0.0 && L.L_y_sigma == 0.0;
  double nd_gap = 0.0;
  for (const auto& p : ab.pairs) {
    finite = finite && std::isfinite(p.total) && p.total >= 0;
    double nd = std::numeric_limits<double>::quiet_NaN();
    if (nodiff) {
      nd = no_diffusion_pair_bound(L, B, p.i, p.j);
      nd_gap = std::max(nd_gap, std::abs(nd - p.total) / std::max(1.0, std::abs(p.total)));
    }
    tp.add({num(p.i), num(p.j), num(p.c0), num(p.c1), num(p.c2), num(p.lambda1), num(p.total), num(nd)});
  }
  r.tables.push_back(tp);
  r.results["alpha_bound"] = {{"alpha", ab.alpha}, {"argmax", ab.argmax}, {"C", ab.C}, {"note", ab.note}};
  r.check("bound_finite", finite && std::isfinite(ab.alpha), ab.alpha, 0.0, "all pair constants finite and >= 0");
  if (nodiff) r.check("no_diffusion_consistent", nd_gap <= 1e-10, nd_gap, 1e-10, "reduced vs general pair constant");

  Eigen::VectorXd Q, G;
  if (deviation_weights(c, n, Q, G)) {
    json lq = json::array();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        lq.push_back({{"i", i}, {"j", j}, {"value", lq_pair_bound(Q[i], Q[j], G[i], G[j], n, B.lambda1(i, j), B.C)}});
    r.results["lq_pair_bounds"] = lq;
  }

  // decay illustration with every coefficient constant at the ledger maximum
  const double Lall = std::max({L.L_b, L.L_y_b, L.L_sigma, L.L_y_sigma});
  Table tc{"cor2", {"N", "gap_term", "coupling_term", "lambda_term", "total"}, {}};
  json jc = json::array();
  double prev = std::numeric_limits<double>::infinity();
  bool decreasing = true;
  std::vector<int> ns = c.scaling_players;
  std::sort(ns.begin(), ns.end());
  for (int m : ns) {
    Cor2Terms t = cor2_bound(Lall, 1.0, 0.75, m, B);
    tc.add({num(m), num(t.gap_term), num(t.coupling_term), num(t.lambda_term), num(t.total)});
    jc.push_back({{"N", m}, {"total", t.total}, {"gap", t.gap_term}, {"coupling", t.coupling_term},
                  {"lambda", t.lambda_term}});
    decreasing = decreasing && t.total < prev;
    prev = t.total;
  }
  r.tables.push_back(tc);
  r.results["cor2"] = {{"L", Lall}, {"L_tilde", 1.0}, {"beta", 0.75}, {"rows", jc}};
  r.check("cor2_decreasing", decreasing, prev, 0.0, "N^-beta bound decreasing over scaling_players");

  // moment constants with the deterministic part of the control
  TimeGrid grid(c.steps, c.horizon);
  ControlProfile u = build_control(c, n);
  Table tm{"moment_constants", {"p", "player", "I0", "CX", "I1", "I2"}, {}};
  json jm = json::array();
  for (double p : {2.0, 4.0}) {
    std::vector<double> xi(n), un(n, 0.0);
    for (int i = 0; i < n; ++i) {
      xi[i] = normal_moment(spec.initial.mean[i], spec.initial.stdev[i], p);
      for (int k = 0; k < grid.n_steps; ++k) un[i] += std::pow(std::abs(u.deterministic_part(i, grid.t(k))), p) * grid.dt;
    }
    MomentConstants mc = moment_bound_constants(L, p, xi, un, c.horizon);
    for (int i = 0; i < n; ++i) tm.add({num(p), num(i), num(mc.I0[i]), num(mc.CX[i]), num(mc.I1), num(mc.I2)});
    jm.push_back({{"p", p}, {"I0", mc.I0}, {"CX", mc.CX}, {"I1", mc.I1}, {"I2", mc.I2}});
  }
  r.tables.push_back(tm);
  r.results["moment_constants"] = jm;
  if (u.noise_dependent()) r.results["moment_note"] = "control loadings on the noise are left out of the control norm";
}

// ---------------------------------------------------------------- scaling

void run_scaling(const ExperimentConfig& c, RunReport& r) {
  std::vector<int> ns = c.scaling_players;
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  Table t{"scaling",
          {"N", "alpha_hat", "alpha_hat_se", "max_pair", "max_pair_se", "max_pair_normalized", "bound",
           "lq_pair_bound_max", "lq_alpha"},
          {}};
  std::vector<double> x, ah, bd, mp;
  json rows = json::array();
  for (int n : ns) {
    AlphaRun a = alpha_run(c, n);
    double mpn = 0.0;
    for (const auto& p : a.matrix.pairs) mpn = std::max(mpn, p.normalized);
    double lqmax = std::numeric_limits<double>::quiet_NaN(), lqalpha = lqmax;
    if (a.lq.size()) {
      lqmax = a.lq.maxCoeff();
      lqalpha = 2.0 * a.lq.rowwise().sum().maxCoeff();
    }
    t.add({num(n), num(a.alpha_hat.value), num(a.alpha_hat.se), num(a.max_pair), num(a.max_pair_se), num(mpn),
           num(a.bound.alpha), num(lqmax), num(lqalpha)});
    json row = {{"N", n},           {"alpha_hat", estimate_json(a.alpha_hat)},
                {"max_pair", {{"value", a.max_pair}, {"se", a.max_pair_se}, {"i", a.max_i}, {"j", a.max_j}}},
                {"max_pair_normalized", mpn}, {"bound", a.bound.alpha}};
    if (a.lq.size()) row["lq_pair_bound_max"] = lqmax, row["lq_alpha"] = lqalpha;
    rows.push_back(row);
    x.push_back(n);
    ah.push_back(a.alpha_hat.value);
    bd.push_back(a.bound.alpha);
    mp.push_back(a.max_pair);
  }
  r.tables.push_back(t);
  r.results["rows"] = rows;
  const double sa = loglog_slope(x, ah), sb = loglog_slope(x, bd), sm = loglog_slope(x, mp);
  r.results["slopes"] = {{"alpha_hat", sa}, {"bound", sb}, {"max_pair", sm}};
  bool dec = true;
  for (size_t k = 1; k < mp.size(); ++k) dec = dec && mp[k] < mp[k - 1];
  r.check("alpha_hat_slope", sa >= -1.4 && sa <= -0.6, sa, -0.6, "log-log slope of alpha_hat in [-1.4, -0.6]");
  r.check("bound_decays_as_fast", sb <= sa, sb, sa, "slope of the closed-form bound <= slope of alpha_hat");
  r.check("max_pair_decreasing", dec, sm, 0.0, "largest pair asymmetry strictly decreasing in N");
}

// ---------------------------------------------------------------- potential

void run_potential(const ExperimentConfig& c, RunReport& r) {
  Setup s = setup(c, c.players, c.seed);
  const GameSpec& spec = s.game.spec;
  const int n = spec.n_players;
  const std::vector<Shape> fam = [&] {
    std::vector<Shape> f;
    for (const auto& nm : c.family) f.push_back(shape_from_name(nm));
    return f;
  }();
  PotentialOptions po;
  po.order = c.quadrature_order;
  const ControlProfile anchor = ControlProfile::zero(n, c.horizon);
  PotentialEstimate phi = potential_value(spec, anchor, s.control, s.noise, po);
  r.results["potential"] = {{"value", phi.value}, {"se", phi.se}, {"quadrature_order", po.order}};

  Table t{"potential", {"deviation", "player", "dV", "dV_se", "dPhi", "dPhi_se", "gap", "gap_se"}, {}};
  json rows = json::array();
  double worst = 0.0;
  for (int d = 0; d < c.deviations; ++d) {
    const int i = d % n;
    ControlProfile dev = s.control;
    for (size_t k = 0; k < fam.size(); ++k)
      dev.coef(i, fam[k]) += 0.5 * counter_normal(c.seed, 0x5eed, static_cast<std::uint64_t>(d), k);
    DeviationGap g = potential_deviation_gap(spec, s.control, i, dev, anchor, s.noise, po);
    t.add({num(d), num(i), num(g.dV.value), num(g.dV.se), num(g.dPhi.value), num(g.dPhi.se), num(g.gap), num(g.se)});
    rows.push_back({{"deviation", d}, {"player", i}, {"dV", estimate_json(g.dV)}, {"dPhi", estimate_json(g.dPhi)},
                    {"gap", g.gap}, {"gap_se", g.se}});
    worst = std::max(worst, g.gap / (3.0 * g.se + 1e-14));
  }
  r.tables.push_back(t);
  r.results["deviations"] = rows;
  const bool same = identical_costs(c, n);
  r.results["identical_costs"] = same;
  if (same) r.check("potential_gap_zero", worst <= 1.0, worst, 1.0, "largest |dV - dPhi| / (3 SE)");
  else r.results["largest_gap_over_3se"] = worst;
}

// ---------------------------------------------------------------- nash-gap

void run_nash_gap(const ExperimentConfig& c, RunReport& r) {
  GameWithLedger g = build_game(c);
  const GameSpec& spec = g.spec;
  const int n = spec.n_players;
  TimeGrid grid(c.steps, c.horizon);
  std::vector<Shape> fam;
  for (const auto& nm : c.family) fam.push_back(shape_from_name(nm));
  const int K = static_cast<int>(fam.size());
  // fit on one sample, judge on an independent one
  NoiseBundle fit = make_noise(spec, grid, c.seed, c.paths);
  NoiseBundle eval = make_noise(spec, grid, c.seed + 1, c.paths);
  FamilyMinimizer fm = minimize_potential_family(spec, fam, fit);
  Eigen::VectorXd geval;
  family_gradient(spec, fam, fm.theta, eval, geval);
  Eigen::MatrixXd S = 0.5 * (fm.jacobian + fm.jacobian.transpose());
  const double eps_opt = 0.5 * std::abs(geval.dot(S.ldlt().solve(geval)));

  const ControlProfile a = family_profile(n, c.horizon, fam, fm.theta);
  std::vector<Deviation> devs;
  std::vector<std::string> labels;
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < K; ++k)
      for (double step : {0.5, -0.5}) {
        Eigen::VectorXd th = fm.theta;
        th[i * K + k] += step;
        devs.push_back({i, family_profile(n, c.horizon, fam, th)});
        labels.push_back(shape_name(fam[k]) + (step > 0 ? "+" : "-"));
      }
    // best response inside the family from the own-block quadratic model
    Eigen::MatrixXd Jii = fm.jacobian.block(i * K, i * K, K, K);
    Eigen::VectorXd th = fm.theta;
    th.segment(i * K, K) -= Jii.colPivHouseholderQr().solve(geval.segment(i * K, K));
    devs.push_back({i, family_profile(n, c.horizon, fam, th)});
    labels.push_back("best-response");
  }
  Exploitability ex = exploitability(spec, a, devs, eval);

  Table t{"nash_gap", {"player", "deviation", "gain", "gain_se"}, {}};
  json rows = json::array();
  for (size_t d = 0; d < devs.size(); ++d) {
    t.add({num(devs[d].player), labels[d], num(ex.gains[d].value), num(ex.gains[d].se)});
    rows.push_back({{"player", devs[d].player}, {"deviation", labels[d]}, {"gain", estimate_json(ex.gains[d])}});
  }
  r.tables.push_back(t);
  std::vector<double> th(fm.theta.data(), fm.theta.data() + fm.theta.size());
  std::vector<double> gf(fm.gradient.data(), fm.gradient.data() + fm.gradient.size());
  std::vector<double> ge(geval.data(), geval.data() + geval.size());
  r.results["family"] = c.family;
  r.results["theta"] = th;
  r.results["gradient_fit"] = gf;
  r.results["gradient_eval"] = ge;
  r.results["iterations"] = fm.iterations;
  r.results["eps_opt_fit"] = fm.eps_opt;
  r.results["eps_opt"] = eps_opt;
  r.results["exploitability"] = {{"value", ex.value}, {"se", ex.se}, {"player", ex.player},
                                 {"deviation", ex.deviation >= 0 ? labels[ex.deviation] : ""}};
  r.results["deviations"] = rows;
  r.results["seeds"] = {{"fit", c.seed}, {"eval", c.seed + 1}};
  const double thr = eps_opt + 3.0 * ex.se;
  r.check("exploitability_within_eps_opt", ex.value <= thr, ex.value, thr, "exploitability <= eps_opt + 3 SE");
}

}  // namespace

double estimate_seconds(const std::string& sub, const ExperimentConfig& c) {
  // seconds per simulated player-step on one core, measured on the tanh preset
  const double unit = 4e-8;
  auto nodes = [&](int n) { return static_cast<double>(c.paths) * c.steps * n; };
  const double n = c.players, D = static_cast<double>(c.directions.size()), E = static_cast<double>(c.fd_eps.size());
  const double sims_per_adjoint = 6.0;
  if (sub == "simulate") return unit * nodes(c.players) * (1.0 + 2.0 * n);
  if (sub == "deriv") return unit * nodes(c.players) * (2.0 * E * n * D + n * D + sims_per_adjoint * n * n);
  if (sub == "cross-check") {
    double combos = n * (n - 1) / 2 * D * D;
    if (c.max_pairs > 0) combos = std::min(combos, static_cast<double>(c.max_pairs));
    return 3.0 * unit * nodes(c.players) * (combos * (4.0 * E + 2.0 * n) + sims_per_adjoint * n * n * n);
  }
  auto alpha_cost = [&](double m) {
    if (c.method == "Z-ORACLE") return unit * nodes(static_cast<int>(m)) * (m * D + 0.1 * m * m * D * D);
    if (c.method == "FD") return unit * nodes(static_cast<int>(m)) * m * (m - 1) / 2 * D * D * 4.0 * E;
    return unit * nodes(static_cast<int>(m)) * (m * (m - 1) / 2 * D * D * m + sims_per_adjoint * m * m * m);
  };
  if (sub == "alpha") return alpha_cost(n);
  if (sub == "scaling") {
    double t = 0.0;
    for (int m : c.scaling_players) t += alpha_cost(m);
    return t;
  }
  if (sub == "potential")
    return unit * nodes(c.players) * (c.deviations * 2.0 + 1.0) * c.quadrature_order * (1.0 + n);
  if (sub == "nash-gap") {
    const double m = n * c.family.size();
    return unit * nodes(c.players) * ((m + 1.0) * (1.0 + n * c.family.size()) + 4.0 * m);
  }
  return 0.0;
}

RunReport run(const std::string& sub, const ExperimentConfig& c) {
  if (std::find(subcommands().begin(), subcommands().end(), sub) == subcommands().end())
    throw ConfigError("unknown subcommand '" + sub + "'");
  c.validate();
  if (c.threads > 0) set_thread_count(c.threads);
  RunReport r;
  r.subcommand = sub;
  r.config = to_json(c);
  // thread count never changes the numbers; it is reported under runtime
  r.config.erase("threads");
  const auto t0 = std::chrono::steady_clock::now();
  if (sub == "simulate") run_simulate(c, r);
  else if (sub == "deriv") run_deriv(c, r);
  else if (sub == "cross-check") run_cross_check(c, r);
  else if (sub == "alpha") run_alpha(c, r);
  else if (sub == "bound") run_bound(c, r);
  else if (sub == "scaling") run_scaling(c, r);
  else if (sub == "potential") run_potential(c, r);
  else run_nash_gap(c, r);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.runtime = {{"seconds", secs}, {"threads", thread_count()}, {"estimated_seconds", estimate_seconds(sub, c)}};
  return r;
}

void write_report(const RunReport& r, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "tables");
  {
    std::ofstream out(fs::path(dir) / "report.json");
    if (!out) throw std::runtime_error("cannot write report.json under " + dir);
    out << r.to_json().dump(2) << "\n";
  }
  for (const Table& t : r.tables) {
    std::ofstream out(fs::path(dir) / "tables" / (t.name + ".csv"));
    if (!out) throw std::runtime_error("cannot write table " + t.name);
    out.imbue(std::locale::classic());
    auto line = [&](const std::vector<std::string>& cells) {
      for (size_t k = 0; k < cells.size(); ++k) out << (k ? "," : "") << cells[k];
      out << "\n";
    };
    line(t.header);
    for (const auto& row : t.rows) line(row);
  }
}

}  // namespace ag
