#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ag/model/controls.hpp"
#include "ag/model/game.hpp"
#include "ag/model/noise.hpp"
#include "ag/util/stats.hpp"

namespace ag {

struct PathEnsemble {
  TimeGrid grid;
  int n_paths = 0, n_players = 0, drivers = 0;
  std::uint64_t seed = 0;
  std::vector<double> states;    // [p][k][i]
  std::vector<double> controls;  // [p][k][i], or [k][i] when shared
  std::vector<double> levels;    // Brownian levels [p][k][j], only for noise-dependent controls
  bool shared_controls = true;

  size_t node(int p, int k) const { return static_cast<size_t>(p) * (grid.n_steps + 1) + k; }
  const double* x(int p, int k) const { return &states[node(p, k) * n_players]; }
  const double* u(int p, int k) const {
    return shared_controls ? &controls[static_cast<size_t>(k) * n_players] : &controls[node(p, k) * n_players];
  }
  const double* w(int p, int k) const { return levels.empty() ? nullptr : &levels[node(p, k) * drivers]; }
};

// Per-thread scratch with drift and diffusion partials of every player at a node.
struct NodePartials {
  std::vector<CoefPartials> b, s;
  explicit NodePartials(int n = 0);
  void eval(const GameSpec& spec, double t, const double* x, const double* u, Order order);
};

// Euler-Maruyama for one path without storing anything but the caller's
// buffers. x has (M+1) N entries, u the same; w (optional) (M+1) d.
void simulate_path(const GameSpec& spec, const ControlProfile& ctrl, const std::vector<double>& table,
                   const NoiseBundle& noise, int p, double* x, double* u, double* w);

PathEnsemble simulate_paths(const GameSpec& spec, const ControlProfile& ctrl, const TimeGrid& grid,
                            const NoiseBundle& noise);

struct VariationalCoefficients {
  Eigen::MatrixXd B0;               // N x N
  std::vector<Eigen::MatrixXd> Pi0;  // one per noise driver, row j only
  Eigen::VectorXd b1u, pi1u;        // du of drift and diffusion per player
};

VariationalCoefficients assemble_variational(const GameSpec& spec, const PathEnsemble& ens, int p, int k);
VariationalCoefficients assemble_variational(const NodePartials& np, int n_players, int drivers);

// sup over grid nodes of the sample mean of |X_i|^p.
Estimate empirical_moment(const PathEnsemble& ens, int i, double p);

void check_compatible(const PathEnsemble& ens, const NoiseBundle& noise);

}  // namespace ag
