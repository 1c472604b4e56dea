#include "ag/model/game.hpp"

#include <boost/random/sobol.hpp>
#include <cmath>
#include <stdexcept>

namespace ag {

TimeGrid::TimeGrid(int steps, double T) : n_steps(steps), horizon(T) {
  if (steps < 1) throw std::invalid_argument("time grid needs at least one step");
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon must be positive and finite");
  dt = T / steps;
}

void CoefPartials::resize(int n) {
  dy = Eigen::VectorXd::Zero(n);
  dxy = Eigen::VectorXd::Zero(n);
  duy = Eigen::VectorXd::Zero(n);
  dyy = Eigen::MatrixXd::Zero(n, n);
}

void CoefPartials::clear() {
  v = dx = du = dxx = dxu = duu = 0.0;
  dy.setZero();
  dxy.setZero();
  duy.setZero();
  dyy.setZero();
}

void CostPartials::resize(int n) {
  dy = Eigen::VectorXd::Zero(n);
  du = Eigen::VectorXd::Zero(n);
  dyy = Eigen::MatrixXd::Zero(n, n);
  dyu = Eigen::MatrixXd::Zero(n, n);
  duu = Eigen::MatrixXd::Zero(n, n);
}

void CostPartials::clear() {
  v = 0.0;
  dy.setZero();
  du.setZero();
  dyy.setZero();
  dyu.setZero();
  duu.setZero();
}

bool GameSpec::curved() const { return drift->curved() || diffusion->curved(); }

void GameSpec::check() const {
  if (n_players < 1) throw std::invalid_argument("game needs at least one player");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!drift || !diffusion || !running || !terminal) throw std::invalid_argument("game '" + name + "' has a missing evaluator");
  if (initial.mean.size() != n_players || initial.stdev.size() != n_players)
    throw std::invalid_argument("initial law size does not match player count");
  for (int i = 0; i < n_players; ++i)
    if (!(initial.stdev[i] >= 0.0) || !std::isfinite(initial.mean[i]))
      throw std::invalid_argument("initial law of player " + std::to_string(i) + " is invalid");
}

void CostGapNorms::resize(int n) {
  fxx = Eigen::MatrixXd::Zero(n, n);
  fxu = Eigen::MatrixXd::Zero(n, n);
  fuu = Eigen::MatrixXd::Zero(n, n);
  gxx = Eigen::MatrixXd::Zero(n, n);
  fx0 = Eigen::VectorXd::Zero(n);
  gx0 = Eigen::VectorXd::Zero(n);
}

void sample_gap_norms(const GameSpec& spec, const SampleBox& box, ConstantLedger& ledger) {
  const int n = spec.n_players;
  ledger.n_players = n;
  ledger.gaps.assign(static_cast<size_t>(n) * n, CostGapNorms{});
  for (auto& g : ledger.gaps) g.resize(n);
  ledger.sampled = true;

  std::vector<CostPartials> run(n, CostPartials(n)), term(n, CostPartials(n));
  auto update = [&](bool with_terminal) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        CostGapNorms& g = ledger.gap(i, j);
        g.fxx = g.fxx.cwiseMax((run[i].dyy - run[j].dyy).cwiseAbs());
        g.fxu = g.fxu.cwiseMax((run[i].dyu - run[j].dyu).cwiseAbs());
        g.fuu = g.fuu.cwiseMax((run[i].duu - run[j].duu).cwiseAbs());
        if (with_terminal) g.gxx = g.gxx.cwiseMax((term[i].dyy - term[j].dyy).cwiseAbs());
      }
  };

  boost::random::sobol gen(static_cast<unsigned>(1 + 2 * n));
  // 64-bit engine output mapped to [0, 1)
  auto unit = [&gen]() { return std::ldexp(static_cast<double>(gen() >> 11), -53); };
  std::vector<double> y(n), u(n);
  for (int s = 0; s < box.points; ++s) {
    double t = spec.horizon * unit();
    for (int a = 0; a < n; ++a) y[a] = box.state * (2.0 * unit() - 1.0);
    for (int a = 0; a < n; ++a) u[a] = box.control * (2.0 * unit() - 1.0);
    for (int i = 0; i < n; ++i) {
      run[i].clear();
      term[i].clear();
      spec.running->eval(i, t, y.data(), u.data(), Order::second, run[i]);
      spec.terminal->eval(i, y.data(), Order::second, term[i]);
    }
    update(true);
  }

  // Base gradients at zero state and control, sup over a time grid.
  std::fill(y.begin(), y.end(), 0.0);
  std::fill(u.begin(), u.end(), 0.0);
  for (int s = 0; s <= 64; ++s) {
    double t = spec.horizon * s / 64.0;
    for (int i = 0; i < n; ++i) {
      run[i].clear();
      term[i].clear();
      spec.running->eval(i, t, y.data(), u.data(), Order::first, run[i]);
      spec.terminal->eval(i, y.data(), Order::first, term[i]);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        CostGapNorms& g = ledger.gap(i, j);
        g.fx0 = g.fx0.cwiseMax((run[i].dy - run[j].dy).cwiseAbs());
        g.gx0 = g.gx0.cwiseMax((term[i].dy - term[j].dy).cwiseAbs());
      }
  }
}

}  // namespace ag
