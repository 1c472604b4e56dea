#include "ag/bsde/adjoint.hpp"

#include <stdexcept>

namespace ag {

namespace {

struct Scratch {
  int n = -1;
  NodePartials np;
  CostPartials cp;
  std::vector<double> P, Q;
  void ensure(int m, int d) {
    if (n == m) return;
    n = m;
    np = NodePartials(m);
    cp = CostPartials(m);
    P.resize(m);
    Q.resize(static_cast<size_t>(m) * d);
  }
};

}  // namespace

AdjointSolution solve_first_adjoint(const GameSpec& spec, const PathEnsemble& ens, int i, const NoiseBundle& noise,
                                    const RegressionBasis& opts) {
  const int n = spec.n_players;
  if (i < 0 || i >= n) throw std::invalid_argument("first adjoint: player out of range");
  const int M = ens.grid.n_steps;
  BackwardProblem prob;
  prob.dim = n;
  prob.terminal = [&](int p, double* xi) {
    thread_local Scratch s;
    s.ensure(n, spec.drivers());
    s.cp.clear();
    spec.terminal->eval(i, ens.x(p, M), Order::first, s.cp);
    for (int c = 0; c < n; ++c) xi[c] = s.cp.dy[c];
  };
  prob.driver = [&](int p, int k, const double* yn, const double* z, double* out) {
    thread_local Scratch s;
    s.ensure(n, spec.drivers());
    double t = ens.grid.t(k);
    s.np.eval(spec, t, ens.x(p, k), ens.u(p, k), Order::first);
    s.cp.clear();
    spec.running->eval(i, t, ens.x(p, k), ens.u(p, k), Order::first, s.cp);
    for (int c = 0; c < n; ++c) out[c] = s.np.b[c].dx * yn[c] + s.cp.dy[c];
    for (int a = 0; a < n; ++a) {
      const CoefPartials& b = s.np.b[a];
      const CoefPartials& sg = s.np.s[a];
      double qa = z[a * n + a];  // (Q^a)_a, the only entry seen by Pi0[a]
      out[a] += sg.dx * qa;
      for (int c = 0; c < n; ++c) out[c] += b.dy[c] * yn[a] + sg.dy[c] * qa;
    }
  };
  AdjointSolution out;
  out.player = i;
  out.sol = solve_backward(ens, noise, opts, prob);
  return out;
}

void second_adjoint_driver(const GameSpec& spec, const NodePartials& np, const CostPartials& f, const double* Pn,
                           const double* Q, const double* Pm, const double* Qm, int d, double* out) {
  const int n = spec.n_players;
  using RM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RM> Pk(Pn, n, n);
  Eigen::Map<RM> O(out, n, n);
  Eigen::MatrixXd B0(n, n);
  Eigen::MatrixXd R(n, n);  // row j of Pi0[j]
  for (int a = 0; a < n; ++a) {
    B0.row(a) = np.b[a].dy.transpose();
    B0(a, a) += np.b[a].dx;
    R.row(a) = np.s[a].dy.transpose();
    R(a, a) += np.s[a].dx;
  }
  O = B0.transpose() * Pk + Pk * B0 + f.dyy;
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd r = R.row(j).transpose();
    O += Pk(j, j) * r * r.transpose();
    Eigen::Map<const RM> Qj(Q + static_cast<size_t>(j) * n * n, n, n);
    O += r * Qj.row(j) + Qj.col(j) * r.transpose();
  }
  for (int a = 0; a < n; ++a) {
    O += Pm[a] * np.b[a].dyy;
    O += Qm[a * n + a] * np.s[a].dyy;
  }
  (void)d;  // the common driver has no state loading
}

SecondAdjointSolution solve_second_adjoint(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& first,
                                           const NoiseBundle& noise, const RegressionBasis& opts) {
  const int n = spec.n_players, M = ens.grid.n_steps, i = first.player, d = spec.drivers();
  BackwardProblem prob;
  prob.dim = n * n;
  prob.symmetric_side = n;
  prob.terminal = [&](int p, double* xi) {
    thread_local Scratch s;
    s.ensure(n, d);
    s.cp.clear();
    spec.terminal->eval(i, ens.x(p, M), Order::second, s.cp);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) xi[a * n + b] = 0.5 * (s.cp.dyy(a, b) + s.cp.dyy(b, a));
  };
  prob.driver = [&](int p, int k, const double* yn, const double* z, double* out) {
    thread_local Scratch s;
    s.ensure(n, d);
    double t = ens.grid.t(k);
    s.np.eval(spec, t, ens.x(p, k), ens.u(p, k), Order::second);
    s.cp.clear();
    spec.running->eval(i, t, ens.x(p, k), ens.u(p, k), Order::second, s.cp);
    first.sol.y(p, k + 1, s.P.data());
    first.sol.z(p, k, s.Q.data());
    second_adjoint_driver(spec, s.np, s.cp, yn, z, s.P.data(), s.Q.data(), d, out);
  };
  SecondAdjointSolution out;
  out.player = i;
  out.sol = solve_backward(ens, noise, opts, prob);
  return out;
}

}  // namespace ag
