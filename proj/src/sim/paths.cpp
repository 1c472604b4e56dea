#include "ag/sim/paths.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ag/util/parallel.hpp"

namespace ag {

NodePartials::NodePartials(int n) : b(n, CoefPartials(n)), s(n, CoefPartials(n)) {}

void NodePartials::eval(const GameSpec& spec, double t, const double* x, const double* u, Order order) {
  const int n = spec.n_players;
  for (int i = 0; i < n; ++i) {
    spec.drift->eval(i, t, x[i], x, u[i], order, b[i]);
    spec.diffusion->eval(i, t, x[i], x, u[i], order, s[i]);
  }
}

void simulate_path(const GameSpec& spec, const ControlProfile& ctrl, const std::vector<double>& table,
                   const NoiseBundle& noise, int p, double* x, double* u, double* w) {
  const TimeGrid& g = noise.grid();
  const int n = spec.n_players, d = noise.drivers(), M = g.n_steps;
  const bool loaded = ctrl.noise_dependent();
  std::vector<double> wl(d, 0.0);
  thread_local std::vector<double> bv, sv;
  bv.resize(n);
  sv.resize(n);
  for (int i = 0; i < n; ++i) x[i] = spec.initial.sample(i, noise.initial_normal(p, i));
  for (int k = 0; k <= M; ++k) {
    double t = g.t(k);
    double* xk = x + static_cast<size_t>(k) * n;
    double* uk = u + static_cast<size_t>(k) * n;
    for (int i = 0; i < n; ++i) {
      double v = table[static_cast<size_t>(k) * n + i];
      if (loaded)
        for (int j = 0; j < ctrl.drivers() && j < d; ++j) v += ctrl.loading(i, j) * wl[j];
      uk[i] = v;
    }
    if (w)
      for (int j = 0; j < d; ++j) w[static_cast<size_t>(k) * d + j] = wl[j];
    if (k == M) break;
    const double* dW = noise.dW(p, k);
    double* xn = xk + n;
    double common = spec.common_noise ? dW[n] : 0.0;
    spec.drift->values(n, t, xk, uk, bv.data());
    spec.diffusion->values(n, t, xk, uk, sv.data());
    for (int i = 0; i < n; ++i) {
      double v = xk[i] + bv[i] * g.dt + sv[i] * dW[i] + common;
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "non-finite state: path " << p << " step " << k << " player " << i;
        throw std::runtime_error(os.str());
      }
      xn[i] = v;
    }
    for (int j = 0; j < d; ++j) wl[j] += dW[j];
  }
}

void check_compatible(const PathEnsemble& ens, const NoiseBundle& noise) {
  if (!(ens.grid == noise.grid()) || ens.n_paths != noise.paths() || ens.seed != noise.seed())
    throw std::invalid_argument("ensemble and noise bundle do not share seed and grid");
}

PathEnsemble simulate_paths(const GameSpec& spec, const ControlProfile& ctrl, const TimeGrid& grid,
                            const NoiseBundle& noise) {
  spec.check();
  if (!(grid == noise.grid())) throw std::invalid_argument("simulate_paths: grid differs from noise grid");
  if (noise.drivers() != spec.drivers()) throw std::invalid_argument("simulate_paths: noise has wrong driver count");
  if (ctrl.players() != spec.n_players) throw std::invalid_argument("simulate_paths: control profile has wrong player count");
  const int n = spec.n_players, M = grid.n_steps, d = noise.drivers(), P = noise.paths();
  PathEnsemble e;
  e.grid = grid;
  e.n_paths = P;
  e.n_players = n;
  e.drivers = d;
  e.seed = noise.seed();
  e.shared_controls = !ctrl.noise_dependent();
  e.states.resize(static_cast<size_t>(P) * (M + 1) * n);
  std::vector<double> table = ctrl.table(grid);
  if (e.shared_controls) {
    e.controls = table;
  } else {
    e.controls.resize(e.states.size());
    e.levels.resize(static_cast<size_t>(P) * (M + 1) * d);
  }
  for_blocks(P, [&](int, int b, int end) {
    std::vector<double> ubuf(static_cast<size_t>(M + 1) * n);
    for (int p = b; p < end; ++p) {
      double* x = &e.states[e.node(p, 0) * n];
      double* u = e.shared_controls ? ubuf.data() : &e.controls[e.node(p, 0) * n];
      double* w = e.levels.empty() ? nullptr : &e.levels[e.node(p, 0) * d];
      simulate_path(spec, ctrl, table, noise, p, x, u, w);
    }
  });
  return e;
}

VariationalCoefficients assemble_variational(const NodePartials& np, int n, int drivers) {
  VariationalCoefficients v;
  v.B0 = Eigen::MatrixXd::Zero(n, n);
  v.Pi0.assign(drivers, Eigen::MatrixXd::Zero(n, n));
  v.b1u.resize(n);
  v.pi1u.resize(n);
  for (int a = 0; a < n; ++a) {
    v.B0.row(a) = np.b[a].dy.transpose();
    v.B0(a, a) += np.b[a].dx;
    v.Pi0[a].row(a) = np.s[a].dy.transpose();
    v.Pi0[a](a, a) += np.s[a].dx;
    v.b1u[a] = np.b[a].du;
    v.pi1u[a] = np.s[a].du;
  }
  return v;
}

VariationalCoefficients assemble_variational(const GameSpec& spec, const PathEnsemble& ens, int p, int k) {
  NodePartials np(spec.n_players);
  np.eval(spec, ens.grid.t(k), ens.x(p, k), ens.u(p, k), Order::first);
  return assemble_variational(np, spec.n_players, spec.drivers());
}

Estimate empirical_moment(const PathEnsemble& ens, int i, double p) {
  Estimate best;
  bool first = true;
  std::vector<double> v(ens.n_paths);
  for (int k = 0; k <= ens.grid.n_steps; ++k) {
    for (int q = 0; q < ens.n_paths; ++q) v[q] = std::pow(std::abs(ens.x(q, k)[i]), p);
    Estimate e = mean_se(v);
    if (first || e.value > best.value) best = e;
    first = false;
  }
  return best;
}

}  // namespace ag
