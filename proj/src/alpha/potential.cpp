#include "ag/alpha/potential.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <stdexcept>

#include "ag/bsde/adjoint.hpp"
#include "ag/derivatives/derivatives.hpp"
#include "ag/sim/paths.hpp"

namespace ag {

namespace {

template <int Order>
void gauss_nodes(std::vector<double>& x, std::vector<double>& w) {
  using Q = boost::math::quadrature::gauss<double, Order>;
  const auto& a = Q::abscissa();
  const auto& b = Q::weights();
  x.clear();
  w.clear();
  // Boost stores the nonnegative half on [-1, 1]; map to [0, 1]
  for (size_t k = 0; k < a.size(); ++k) {
    if (a[k] == 0.0) {
      x.push_back(0.5);
      w.push_back(0.5 * b[k]);
      continue;
    }
    x.push_back(0.5 * (1.0 - a[k]));
    w.push_back(0.5 * b[k]);
    x.push_back(0.5 * (1.0 + a[k]));
    w.push_back(0.5 * b[k]);
  }
}

void legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  switch (order) {
    case 1: x = {0.5}; w = {1.0}; return;
    case 2: gauss_nodes<2>(x, w); return;
    case 3: gauss_nodes<3>(x, w); return;
    case 4: gauss_nodes<4>(x, w); return;
    case 5: gauss_nodes<5>(x, w); return;
    case 6: gauss_nodes<6>(x, w); return;
    case 7: gauss_nodes<7>(x, w); return;
    case 8: gauss_nodes<8>(x, w); return;
    case 10: gauss_nodes<10>(x, w); return;
    case 12: gauss_nodes<12>(x, w); return;
    case 16: gauss_nodes<16>(x, w); return;
    case 20: gauss_nodes<20>(x, w); return;
    default: break;
  }
  throw std::invalid_argument("potential: quadrature order must be 1-8, 10, 12, 16 or 20");
}

bool moves(const ControlProfile& d, int j) {
  for (int s = 0; s < kShapes; ++s)
    if (d.coef(j, static_cast<Shape>(s)) != 0.0) return true;
  for (int k = 0; k < d.drivers(); ++k)
    if (d.loading(j, k) != 0.0) return true;
  return false;
}

}  // namespace

PotentialEstimate potential_value(const GameSpec& spec, const ControlProfile& anchor, const ControlProfile& a,
                                  const NoiseBundle& noise, const PotentialOptions& opts) {
  if (a.players() != spec.n_players || anchor.players() != spec.n_players)
    throw std::invalid_argument("potential: profile size does not match the game");
  std::vector<double> r, w;
  legendre(opts.order, r, w);
  const ControlProfile diff = a - anchor;
  PotentialEstimate out;
  out.pathwise.assign(noise.paths(), 0.0);
  std::vector<int> active;
  for (int j = 0; j < spec.n_players; ++j)
    if (moves(diff, j)) active.push_back(j);
  if (active.empty()) return out;
  for (size_t q = 0; q < r.size(); ++q) {
    ControlProfile u = anchor + diff * r[q];
    PathEnsemble ens = simulate_paths(spec, u, noise.grid(), noise);
    for (int j : active) {
      AdjointSolution adj = solve_first_adjoint(spec, ens, j, noise, opts.basis);
      BsdeGradient G = first_bsde_gradient(spec, ens, adj);
      std::vector<double> d = first_bsde_pathwise(G, ens, j, diff);
      for (size_t p = 0; p < d.size(); ++p) out.pathwise[p] += w[q] * d[p];
    }
  }
  Estimate e = mean_se(out.pathwise);
  out.value = e.value;
  out.se = e.se;
  return out;
}

ControlProfile unilateral(const ControlProfile& a, int i, const ControlProfile& b) {
  if (i < 0 || i >= a.players() || b.players() != a.players())
    throw std::invalid_argument("unilateral: player or profile size mismatch");
  ControlProfile out = a;
  for (int s = 0; s < kShapes; ++s) out.coef(i, static_cast<Shape>(s)) = b.coef(i, static_cast<Shape>(s));
  int d = std::max(a.drivers(), b.drivers());
  for (int k = 0; k < d; ++k)
    if (out.loading(i, k) != b.loading(i, k)) out.set_loading(i, k, b.loading(i, k));
  return out;
}

DeviationGap potential_deviation_gap(const GameSpec& spec, const ControlProfile& a, int i,
                                     const ControlProfile& deviation, const ControlProfile& anchor,
                                     const NoiseBundle& noise, const PotentialOptions& opts) {
  const ControlProfile b = unilateral(a, i, deviation);
  Eigen::MatrixXd Va = simulate_costs(spec, a, noise);
  Eigen::MatrixXd Vb = simulate_costs(spec, b, noise);
  PotentialEstimate Pa = potential_value(spec, anchor, a, noise, opts);
  PotentialEstimate Pb = potential_value(spec, anchor, b, noise, opts);
  const int P = noise.paths();
  std::vector<double> dv(P), dp(P), gap(P);
  for (int p = 0; p < P; ++p) {
    dv[p] = Vb(p, i) - Va(p, i);
    dp[p] = Pb.pathwise[p] - Pa.pathwise[p];
    gap[p] = dv[p] - dp[p];
  }
  DeviationGap out;
  out.dV = mean_se(dv);
  out.dPhi = mean_se(dp);
  Estimate g = mean_se(gap);
  out.gap = std::abs(g.value);
  out.se = g.se;
  return out;
}

Exploitability exploitability(const GameSpec& spec, const ControlProfile& a, const std::vector<Deviation>& devs,
                              const NoiseBundle& noise) {
  if (devs.empty()) throw std::invalid_argument("exploitability: empty deviation dictionary");
  Eigen::MatrixXd base = simulate_costs(spec, a, noise);
  Exploitability out;
  const int P = noise.paths();
  std::vector<double> gain(P);
  for (size_t d = 0; d < devs.size(); ++d) {
    const int i = devs[d].player;
    Eigen::MatrixXd V = simulate_costs(spec, unilateral(a, i, devs[d].profile), noise);
    for (int p = 0; p < P; ++p) gain[p] = base(p, i) - V(p, i);
    Estimate e = mean_se(gain);
    out.gains.push_back(e);
    double pos = std::max(e.value, 0.0);
    if (out.deviation < 0 || pos > out.value) {
      out.value = pos;
      out.se = e.se;
      out.player = i;
      out.deviation = static_cast<int>(d);
    }
  }
  return out;
}

ControlProfile family_profile(int n, double horizon, const std::vector<Shape>& family, const Eigen::VectorXd& theta) {
  const int K = static_cast<int>(family.size());
  if (theta.size() != static_cast<Eigen::Index>(n) * K) throw std::invalid_argument("family: parameter size mismatch");
  ControlProfile c = ControlProfile::zero(n, horizon);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < K; ++k) c.coef(i, family[k]) += theta[i * K + k];
  return c;
}

void family_gradient(const GameSpec& spec, const std::vector<Shape>& family, const Eigen::VectorXd& theta,
                     const NoiseBundle& noise, Eigen::VectorXd& g) {
  const int n = spec.n_players, K = static_cast<int>(family.size());
  ControlProfile u = family_profile(n, spec.horizon, family, theta);
  PathEnsemble ens = simulate_paths(spec, u, noise.grid(), noise);
  g.resize(static_cast<Eigen::Index>(n) * K);
  for (int h = 0; h < n; ++h) {
    std::vector<ControlProfile> dirs;
    for (Shape s : family) dirs.push_back(ControlProfile::direction(n, spec.horizon, h, s));
    std::vector<Eigen::MatrixXd> D = first_sens_streaming(spec, ens, h, dirs, noise);
    for (int k = 0; k < K; ++k) {
      std::vector<double> col(D[k].rows());
      for (Eigen::Index p = 0; p < D[k].rows(); ++p) col[p] = D[k](p, h);
      g[h * K + k] = mean_se(col).value;
    }
  }
}

FamilyMinimizer minimize_potential_family(const GameSpec& spec, const std::vector<Shape>& family,
                                          const NoiseBundle& noise, int max_iter, double step, double tol) {
  if (family.empty()) throw std::invalid_argument("family: need at least one shape");
  if (!(step > 0)) throw std::invalid_argument("family: step must be positive");
  const int m = spec.n_players * static_cast<int>(family.size());
  FamilyMinimizer out;
  out.family = family;
  out.theta = Eigen::VectorXd::Zero(m);
  family_gradient(spec, family, out.theta, noise, out.gradient);
  for (int it = 0; it < max_iter && out.gradient.norm() > tol; ++it) {
    out.jacobian.resize(m, m);
    for (int c = 0; c < m; ++c) {
      Eigen::VectorXd th = out.theta, gc;
      th[c] += step;
      family_gradient(spec, family, th, noise, gc);
      out.jacobian.col(c) = (gc - out.gradient) / step;
    }
    out.theta -= out.jacobian.colPivHouseholderQr().solve(out.gradient);
    family_gradient(spec, family, out.theta, noise, out.gradient);
    out.iterations = it + 1;
  }
  if (out.jacobian.size() == 0) out.jacobian = Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd S = 0.5 * (out.jacobian + out.jacobian.transpose());
  out.eps_opt = 0.5 * std::abs(out.gradient.dot(S.ldlt().solve(out.gradient)));
  return out;
}

}  // namespace ag
