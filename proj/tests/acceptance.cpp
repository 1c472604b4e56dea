// Acceptance runs. One line per criterion: "criterion K PASS|FAIL ...".
// Usage: acceptance [--only K] [--out DIR]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "ag/app/run.hpp"
#include "ag/bsde/adjoint.hpp"
#include "ag/bsde/backward.hpp"
#include "ag/bsde/duality.hpp"
#include "ag/model/presets.hpp"
#include "ag/sim/paths.hpp"
#include "ag/sim/sensitivity.hpp"
#include "ag/util/parallel.hpp"
#include "ag/util/stats.hpp"

using namespace ag;
using nlohmann::json;

namespace {

// reduced = smaller runs used for the thread-count comparison
struct Scale {
  bool reduced = false;
  int threads = 0;
  std::string out = "acceptance_out";
};

struct Outcome {
  bool pass = false;
  std::string summary;
  json numerics = json::object();
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int prec = 3) {
  std::ostringstream os;
  os.precision(prec);
  os << v;
  return os.str();
}

ExperimentConfig config(const json& j, const Scale& s) {
  ExperimentConfig c = parse_config(j.dump());
  c.threads = s.threads;
  return c;
}

RunReport run_and_save(const std::string& sub, const ExperimentConfig& c, const Scale& s, const std::string& tag) {
  RunReport r = run(sub, c);
  if (!s.reduced) write_report(r, s.out + "/" + tag);
  return r;
}

double check_value(const RunReport& r, const std::string& name) {
  const Check* c = r.find(name);
  if (!c) throw std::logic_error("missing check " + name);
  return c->value;
}

bool check_passed(const RunReport& r, const std::string& name) {
  const Check* c = r.find(name);
  if (!c) throw std::logic_error("missing check " + name);
  return c->passed;
}

const json kControl3 = {{"one", {0.3, 0.1, -0.1}}, {"sine", 0.2}};

// ---------------------------------------------------------------- 1, 2

Outcome first_duality(const json& base, const Scale& s, const std::string& tag, double budget) {
  json j = base;
  j["steps"] = 50;
  j["paths"] = s.reduced ? 2048 : 100000;
  j["directions"] = {"one", "ramp", "sine", "half"};
  j["control"] = kControl3;
  auto t0 = std::chrono::steady_clock::now();
  RunReport r = run_and_save("deriv", config(j, s), s, tag);
  const double secs = seconds_since(t0);
  Outcome o;
  o.numerics = r.numerics();
  const double ws = check_value(r, "fd_vs_sens"), wb = check_value(r, "fd_vs_bsde");
  const bool fast = s.reduced || secs < budget;
  o.pass = check_passed(r, "fd_vs_sens") && check_passed(r, "fd_vs_bsde") && fast;
  o.summary = "worst |FD-SENS|/tol=" + fmt(ws) + " worst |FD-BSDE|/tol=" + fmt(wb) + " runtime=" + fmt(secs) +
              "s (budget " + fmt(budget) + "s)";
  return o;
}

Outcome criterion1(const Scale& s) {
  return first_duality({{"preset", "tanh-coupled"}, {"players", 3}, {"horizon", 1.0}}, s, "c1_tanh", 180.0);
}

Outcome criterion2(const Scale& s) {
  // D_i = 0.2: the control enters the diffusion
  return first_duality({{"preset", "lq"}, {"variant", "heterogeneous"}, {"players", 3}, {"params", {{"D", {0.2, 0.3, 0.4}}}}},
                       s, "c2_lq_controlled_diffusion", 180.0);
}

// ---------------------------------------------------------------- 3

Outcome criterion3(const Scale& s) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  o.pass = true;
  std::vector<std::pair<std::string, json>> cases{
      {"c3_lq", {{"preset", "lq"}, {"players", 2}, {"control", {{"one", {0.3, -0.2}}}}}},
      {"c3_tanh", {{"preset", "tanh-coupled"}, {"players", 3}, {"control", kControl3}}}};
  for (auto& [tag, j] : cases) {
    j["steps"] = 50;
    j["paths"] = s.reduced ? 2048 : 20000;
    j["directions"] = {"one", "sine"};
    RunReport r = run_and_save("cross-check", config(j, s), s, tag);
    o.numerics[tag] = r.numerics();
    for (const char* name : {"fd_vs_z_oracle", "fd_vs_bsde", "z_oracle_vs_bsde"}) {
      o.pass = o.pass && check_passed(r, name);
      o.summary += tag.substr(3) + "." + name + "=" + fmt(check_value(r, name)) + " ";
    }
  }
  const double secs = seconds_since(t0);
  if (!s.reduced && secs >= 600.0) o.pass = false;
  o.summary += "runtime=" + fmt(secs) + "s (budget 600s)";
  return o;
}

// ---------------------------------------------------------------- 4

// Game whose states are independent Brownian motions started at x0.
GameWithLedger brownian_game(int d, double x0_std) {
  LqParams p = LqParams::symmetric(d);
  p.A.setZero(), p.Abar.setZero(), p.B.setZero(), p.b.setZero();
  p.C.setZero(), p.Cbar.setZero(), p.D.setZero();
  p.sigma.setOnes();
  p.x0_mean.setZero();
  p.x0_std.setConstant(x0_std);
  return build_lq_game(p);
}

struct ClosedForm {
  double ny = 0.0, dy = 0.0, nz = 0.0, dz = 0.0;
  double y_err() const { return std::sqrt(ny / dy); }
  double z_err() const { return std::sqrt(nz / dz); }
};

// squared errors are accumulated into e, so replications pool
void closed_form_error(int M, int paths, std::uint64_t seed, ClosedForm& e) {
  const double a = 0.5, T = 1.0;
  GameWithLedger g = brownian_game(1, 0.0);
  TimeGrid grid(M, T);
  NoiseBundle noise = make_noise(g.spec, grid, seed, paths);
  PathEnsemble ens = simulate_paths(g.spec, ControlProfile::zero(1, T), grid, noise);
  LinearBsdeSpec L;
  L.dim = 1;
  L.terminal = [&](int p, double* xi) { xi[0] = ens.x(p, M)[0]; };
  L.A = [a](int, int, Eigen::MatrixXd& A) { A(0, 0) = a; };
  BsdeSolution sol = solve_linear_bsde(L, ens, noise);
  double& ny = e.ny; double& dy = e.dy; double& nz = e.nz; double& dz = e.dz;
  double y, z;
  for (int p = 0; p < paths; ++p)
    for (int k = 0; k <= M; ++k) {
      const double t = grid.t(k), w = ens.x(p, k)[0], g_t = std::exp(a * (T - t));
      sol.y(p, k, &y);
      ny += (y - w * g_t) * (y - w * g_t);
      dy += w * g_t * w * g_t;
      if (k < M) {
        sol.z(p, k, &z);
        nz += (z - g_t) * (z - g_t);
        dz += g_t * g_t;
      }
    }
}

Outcome criterion4(const Scale& s) {
  std::vector<std::pair<int, int>> levels =
      s.reduced ? std::vector<std::pair<int, int>>{{10, 1024}, {20, 2048}}
                : std::vector<std::pair<int, int>>{{10, 10000}, {25, 30000}, {50, 100000}};
  // one replication is dominated by regression noise of the same size as
  // the differences between levels
  const int reps = s.reduced ? 2 : 5;
  Outcome o;
  std::vector<double> ey;
  json rows = json::array();
  for (auto [M, P] : levels) {
    ClosedForm e;
    for (int r = 0; r < reps; ++r) closed_form_error(M, P, 11 + r, e);
    ey.push_back(e.y_err());
    rows.push_back({{"steps", M}, {"paths", P}, {"y_rel_l2", e.y_err()}, {"z_rel_l2", e.z_err()}});
    o.summary += "(M=" + std::to_string(M) + ",P=" + std::to_string(P) + ") y=" + fmt(e.y_err()) + " z=" + fmt(e.z_err()) + "; ";
  }
  o.summary += std::to_string(reps) + " replications per level, ";
  bool monotone = true;
  for (size_t k = 1; k < ey.size(); ++k) monotone = monotone && ey[k] <= ey[k - 1];
  o.pass = monotone && (s.reduced || ey.back() <= 0.05);
  o.summary += monotone ? "non-increasing" : "NOT non-increasing";
  o.numerics["levels"] = rows;
  return o;
}

// ---------------------------------------------------------------- 5

Outcome criterion5(const Scale& s) {
  const int instances = 20, paths = s.reduced ? 1024 : 4000, M = 20;
  Outcome o;
  o.pass = true;
  double worst = 0.0;
  json rows = json::array();
  for (int q = 0; q < instances; ++q) {
    const int m = 1 + q % 3, d = 1 + (q / 3) % 3;
    auto rnd = [q](int a, int b) { return counter_normal(2024, static_cast<std::uint64_t>(q), a, b); };
    Eigen::MatrixXd A(m, m);
    std::vector<Eigen::MatrixXd> B(d, Eigen::MatrixXd(m, m));
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c) {
        A(r, c) = 0.5 * rnd(r, c);
        for (int j = 0; j < d; ++j) B[j](r, c) = 0.3 * rnd(10 + j, r * m + c);
      }
    Eigen::VectorXd amp(m), shift(m);
    for (int c = 0; c < m; ++c) amp[c] = rnd(20, c), shift[c] = rnd(21, c);
    GameWithLedger g = brownian_game(d, 0.3);
    TimeGrid grid(M, 1.0);
    NoiseBundle noise = make_noise(g.spec, grid, 100 + q, paths);
    PathEnsemble ens = simulate_paths(g.spec, ControlProfile::zero(d, 1.0), grid, noise);
    LinearBsdeSpec L;
    L.dim = m;
    L.terminal = [&](int p, double* xi) {
      for (int c = 0; c < m; ++c) xi[c] = std::cos(ens.x(p, M)[c % d]) + shift[c];
    };
    L.A = [&](int, int, Eigen::MatrixXd& out) { out = A; };
    L.B = [&](int, int, int j, Eigen::MatrixXd& out) { out = B[j]; };
    L.forcing = [&](int p, int k, double* f) {
      for (int c = 0; c < m; ++c) f[c] = amp[c] * std::sin(ens.x(p, k)[c % d] + grid.t(k));
    };
    BsdeSolution sol = solve_linear_bsde(L, ens, noise);
    AprioriCheck ac = apriori_bound_check(L, sol, ens);
    worst = std::max(worst, ac.ratio);
    o.pass = o.pass && ac.ratio <= 1.0;
    rows.push_back({{"m", m}, {"d", d}, {"lhs", ac.lhs}, {"rhs", ac.rhs}, {"ratio", ac.ratio}, {"C1", ac.C1},
                    {"constant", ac.constant}});
  }
  o.numerics["instances"] = rows;
  o.summary = std::to_string(instances) + " instances, worst lhs/rhs=" + fmt(worst);
  return o;
}

// ---------------------------------------------------------------- 6

using RM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Estimate trace_duality(int paths, int M, std::uint64_t seed, double* dt_out) {
  GameWithLedger g = build_lq_game(LqParams::heterogeneous(2));
  const GameSpec& spec = g.spec;
  const int n = 2, d = spec.drivers();
  TimeGrid grid(M, spec.horizon);
  NoiseBundle noise = make_noise(spec, grid, seed, paths);
  ControlProfile u = ControlProfile::zero(n, spec.horizon);
  u.coef(0, Shape::one) = 0.3;
  u.coef(1, Shape::sine) = -0.2;
  PathEnsemble ens = simulate_paths(spec, u, grid, noise);
  AdjointSolution first = solve_first_adjoint(spec, ens, 0, noise);
  SecondAdjointSolution second = solve_second_adjoint(spec, ens, first, noise);
  const ControlProfile dh = ControlProfile::direction(n, spec.horizon, 0, Shape::one);
  const ControlProfile dl = ControlProfile::direction(n, spec.horizon, 1, Shape::sine);
  SensitivityEnsemble Yh = propagate_sensitivity(spec, ens, 0, dh, noise);
  SensitivityEnsemble Yl = propagate_sensitivity(spec, ens, 1, dl, noise);
  *dt_out = grid.dt;

  // second adjoint: dP = -F dt + sum_j Q^j dW_j
  MatrixProcess P_like = [&](int p, int k, MatrixNode& node) {
    thread_local NodePartials np;
    thread_local CostPartials cp;
    thread_local std::vector<double> Pn, Q, Pm, Qm, out;
    np = NodePartials(n);
    cp = CostPartials(n);
    Pn.resize(n * n), Q.resize(d * n * n), Pm.resize(n), Qm.resize(d * n), out.resize(n * n);
    second.sol.y(p, k, out.data());
    node.value = Eigen::Map<RM>(out.data(), n, n);
    if (k == M) return;
    const double t = grid.t(k);
    np.eval(spec, t, ens.x(p, k), ens.u(p, k), Order::second);
    cp.clear();
    spec.running->eval(0, t, ens.x(p, k), ens.u(p, k), Order::second, cp);
    second.sol.y(p, k + 1, Pn.data());
    second.sol.z(p, k, Q.data());
    first.sol.y(p, k + 1, Pm.data());
    first.sol.z(p, k, Qm.data());
    second_adjoint_driver(spec, np, cp, Pn.data(), Q.data(), Pm.data(), Qm.data(), d, out.data());
    node.drift = -Eigen::Map<RM>(out.data(), n, n);
    node.diffusion.resize(d);
    for (int j = 0; j < d; ++j) node.diffusion[j] = Eigen::Map<RM>(Q.data() + static_cast<size_t>(j) * n * n, n, n);
  };
  // outer product of the two first variations, by Ito's product rule
  MatrixProcess Y_like = [&](int p, int k, MatrixNode& node) {
    thread_local NodePartials np;
    np = NodePartials(n);
    Eigen::Map<const Eigen::VectorXd> yh(Yh.y(p, k), n), yl(Yl.y(p, k), n);
    node.value = yh * yl.transpose();
    if (k == M) return;
    np.eval(spec, grid.t(k), ens.x(p, k), ens.u(p, k), Order::first);
    VariationalCoefficients vc = assemble_variational(np, n, d);
    const double uh = direction_value(dh, 0, ens, p, k), ul = direction_value(dl, 1, ens, p, k);
    Eigen::VectorXd ah = vc.B0 * yh, al = vc.B0 * yl;
    ah[0] += vc.b1u[0] * uh;
    al[1] += vc.b1u[1] * ul;
    node.drift = ah * yl.transpose() + yh * al.transpose();
    node.diffusion.assign(d, Eigen::MatrixXd::Zero(n, n));
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd bh = vc.Pi0[j] * yh, bl = vc.Pi0[j] * yl;
      if (j == 0) bh[0] += vc.pi1u[0] * uh;
      if (j == 1) bl[1] += vc.pi1u[1] * ul;
      node.drift += bh * bl.transpose();
      node.diffusion[j] = bh * yl.transpose() + yh * bl.transpose();
    }
  };
  return trace_duality_residual(paths, grid, P_like, Y_like);
}

Outcome criterion6(const Scale& s) {
  double dt = 0.0;
  Estimate r = trace_duality(s.reduced ? 2048 : 100000, 50, 5, &dt);
  Outcome o;
  const double tol = 3.0 * r.se + 5.0 * dt;
  o.pass = std::abs(r.value) <= tol;
  o.summary = "residual=" + fmt(r.value) + " SE=" + fmt(r.se) + " tol=3SE+5dt=" + fmt(tol);
  o.numerics = {{"residual", r.value}, {"se", r.se}, {"dt", dt}};
  return o;
}

// ---------------------------------------------------------------- 7

// identical costs, no mean coupling in the dynamics, heterogeneous A_i
const json kPotentialLq = {{"preset", "lq"},
                           {"variant", "symmetric"},
                           {"players", 3},
                           {"steps", 50},
                           {"params", {{"Abar", 0.0}, {"Cbar", 0.0}, {"A", {-0.5, -0.2, 0.1}}}}};

Outcome criterion7(const Scale& s) {
  json j = kPotentialLq;
  j["paths"] = s.reduced ? 2048 : 20000;
  j["control"] = {{"one", {0.2, -0.1, 0.05}}};
  j["deviations"] = 8;
  Outcome o;
  RunReport a = run_and_save("alpha", config(j, s), s, "c7_alpha");
  RunReport p = run_and_save("potential", config(j, s), s, "c7_potential");
  o.numerics = {{"alpha", a.numerics()}, {"potential", p.numerics()}};
  o.pass = check_passed(a, "zero_asymmetry") && check_passed(p, "potential_gap_zero");
  o.summary = "largest asymmetry/(3SE)=" + fmt(check_value(a, "zero_asymmetry")) +
              " largest deviation gap/(3SE)=" + fmt(check_value(p, "potential_gap_zero")) + " over 8 deviations";
  return o;
}

// ---------------------------------------------------------------- 8

Outcome criterion8(const Scale& s) {
  json j = {{"preset", "lq"}, {"variant", "heterogeneous"}, {"spread", 1.0}, {"steps", 40}, {"method", "Z-ORACLE"}};
  j["paths"] = s.reduced ? 2048 : 50000;
  j["scaling_players"] = s.reduced ? json{2, 4} : json{2, 4, 8, 16};
  auto t0 = std::chrono::steady_clock::now();
  RunReport r = run_and_save("scaling", config(j, s), s, "c8_lq_scaling");
  const double secs = seconds_since(t0);
  Outcome o;
  o.numerics["lq"] = r.numerics();
  const bool fast = s.reduced || secs < 900.0;
  o.pass = check_passed(r, "alpha_hat_slope") && check_passed(r, "bound_decays_as_fast") && fast;
  std::string rows;
  for (const auto& row : r.results["rows"])
    rows += "N=" + std::to_string(row["N"].get<int>()) + ":" + fmt(row["alpha_hat"]["value"].get<double>()) + " ";
  o.summary = "alpha_hat " + rows + "slope=" + fmt(check_value(r, "alpha_hat_slope")) +
              " bound slope=" + fmt(check_value(r, "bound_decays_as_fast")) + " runtime=" + fmt(secs) + "s";
  // mean-field family, where the cost gaps shrink with N
  json m = {{"preset", "mean-field"}, {"variant", "heterogeneous"}, {"steps", 40}, {"method", "Z-ORACLE"}};
  m["paths"] = s.reduced ? 1024 : 10000;
  m["scaling_players"] = s.reduced ? json{2, 4} : json{2, 4, 8};
  RunReport mf = run_and_save("scaling", config(m, s), s, "c8_mean_field_scaling");
  o.numerics["mean_field"] = mf.numerics();
  o.summary += " | mean-field diagnostic slope=" + fmt(mf.results["slopes"]["alpha_hat"].get<double>());
  return o;
}

// ---------------------------------------------------------------- 9

Outcome criterion9(const Scale& s) {
  Outcome o;
  o.pass = true;
  const std::vector<std::pair<std::string, json>> presets{
      {"lq", {{"preset", "lq"}, {"players", 3}, {"control", kControl3}}},
      {"mean-field", {{"preset", "mean-field"}, {"players", 4}, {"control", {{"one", 0.3}}}}},
      {"tanh-coupled", {{"preset", "tanh-coupled"}, {"players", 3}, {"control", kControl3}}}};
  for (auto [name, j] : presets) {
    j["steps"] = 50;
    j["paths"] = s.reduced ? 1024 : 20000;
    RunReport r = run_and_save("simulate", config(j, s), s, "c9_" + name);
    o.numerics[name] = r.numerics();
    for (const char* c : {"ledger_validation", "state_moment_p2", "state_moment_p4", "sensitivity_moment_p2",
                          "sensitivity_moment_p4"})
      o.pass = o.pass && check_passed(r, c);
    o.summary += name + ": state/CX p2=" + fmt(check_value(r, "state_moment_p2"), 2) +
                 " p4=" + fmt(check_value(r, "state_moment_p4"), 2) +
                 " sens/bound p2=" + fmt(check_value(r, "sensitivity_moment_p2"), 2) +
                 " p4=" + fmt(check_value(r, "sensitivity_moment_p4"), 2) + "; ";
  }
  return o;
}

// ---------------------------------------------------------------- 10

Outcome criterion10(const Scale& s) {
  Outcome o;
  json same = {{"preset", "common-noise"}, {"variant", "identical-costs"}, {"players", 4}, {"steps", 50}};
  same["paths"] = s.reduced ? 2048 : 20000;
  RunReport a = run_and_save("alpha", config(same, s), s, "c10_identical");
  json het = {{"preset", "common-noise"}, {"variant", "heterogeneous"}, {"steps", 50}};
  het["paths"] = s.reduced ? 2048 : 20000;
  het["scaling_players"] = {2, 4, 8};
  RunReport sc = run_and_save("scaling", config(het, s), s, "c10_heterogeneous_scaling");
  o.numerics = {{"identical", a.numerics()}, {"heterogeneous", sc.numerics()}};
  o.pass = check_passed(a, "zero_asymmetry") && check_passed(sc, "max_pair_decreasing");
  o.summary = "identical costs: largest asymmetry/(3SE)=" + fmt(check_value(a, "zero_asymmetry")) + "; heterogeneous ";
  for (const auto& row : sc.results["rows"]) {
    const double mp = row["max_pair"]["value"].get<double>(), lq = row["lq_pair_bound_max"].get<double>();
    o.summary += "N=" + std::to_string(row["N"].get<int>()) + " max pair=" + fmt(mp) +
                 " (C=1 pair bound " + fmt(lq) + ", ratio " + fmt(mp / lq) + ") ";
  }
  o.summary += check_passed(sc, "max_pair_decreasing") ? "decreasing" : "NOT decreasing";
  return o;
}

// ---------------------------------------------------------------- 11

Outcome criterion11(const Scale& s) {
  json j = kPotentialLq;
  j["paths"] = s.reduced ? 2048 : 20000;
  j["family"] = {"one", "ramp", "sine"};
  RunReport r = run_and_save("nash-gap", config(j, s), s, "c11_nash_gap");
  Outcome o;
  o.numerics = r.numerics();
  o.pass = check_passed(r, "exploitability_within_eps_opt");
  const Check* c = r.find("exploitability_within_eps_opt");
  o.summary = "exploitability=" + fmt(c->value) + " eps_opt+3SE=" + fmt(c->threshold) +
              " eps_opt=" + fmt(r.results["eps_opt"].get<double>());
  return o;
}

// ---------------------------------------------------------------- 12

using Criterion = std::function<Outcome(const Scale&)>;
const std::map<int, Criterion>& criteria();

Outcome criterion12(const Scale&) {
  Outcome o;
  o.pass = true;
  const int before = thread_count();
  std::vector<int> bad;
  for (const auto& [k, fn] : criteria()) {
    if (k == 12) continue;
    Scale a, b;
    a.reduced = b.reduced = true;
    a.threads = 1;
    b.threads = 3;
    const std::string ja = fn(a).numerics.dump(), jb = fn(b).numerics.dump();
    const Outcome again = fn(a);
    if (ja != jb || ja != again.numerics.dump()) {
      o.pass = false;
      bad.push_back(k);
    }
  }
  set_thread_count(before);
  o.summary = "criteria 1-11 rerun at reduced size with 1 and 3 threads and repeated: ";
  if (bad.empty()) {
    o.summary += "all numerics bit-identical";
  } else {
    o.summary += "differences in";
    for (int k : bad) o.summary += " " + std::to_string(k);
  }
  return o;
}

const std::map<int, Criterion>& criteria() {
  static const std::map<int, Criterion> c{{1, criterion1},   {2, criterion2},   {3, criterion3},  {4, criterion4},
                                          {5, criterion5},   {6, criterion6},   {7, criterion7},  {8, criterion8},
                                          {9, criterion9},   {10, criterion10}, {11, criterion11}, {12, criterion12}};
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  Scale scale;
  for (int a = 1; a < argc; ++a) {
    if (!std::strcmp(argv[a], "--only") && a + 1 < argc) only = std::atoi(argv[++a]);
    else if (!std::strcmp(argv[a], "--out") && a + 1 < argc) scale.out = argv[++a];
    else {
      std::cerr << "usage: acceptance [--only K] [--out DIR]\n";
      return 2;
    }
  }
  if (only != 0 && !criteria().count(only)) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  bool all = true;
  for (const auto& [k, fn] : criteria()) {
    if (only && k != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn(scale);
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("error: ") + e.what();
    }
    std::printf("criterion %d %s %s [%.1fs]\n", k, o.pass ? "PASS" : "FAIL", o.summary.c_str(), seconds_since(t0));
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
