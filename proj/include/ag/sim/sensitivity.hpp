#pragma once

#include <vector>

#include "ag/sim/paths.hpp"

namespace ag {

// First-order variation of the state when player h's control moves along
// the direction's player-h component.
struct SensitivityEnsemble {
  int h = 0;
  ControlProfile direction;
  TimeGrid grid;
  int n_paths = 0, n_players = 0;
  std::vector<double> values;  // [p][k][i]

  const double* y(int p, int k) const {
    return &values[(static_cast<size_t>(p) * (grid.n_steps + 1) + k) * n_players];
  }
};

struct SecondSensitivityEnsemble {
  int h = 0, l = 0;
  TimeGrid grid;
  int n_paths = 0, n_players = 0;
  std::vector<double> values;

  const double* z(int p, int k) const {
    return &values[(static_cast<size_t>(p) * (grid.n_steps + 1) + k) * n_players];
  }
};

// Direction value of player h at node k on path p.
double direction_value(const ControlProfile& dir, int h, const PathEnsemble& ens, int p, int k);

// One Euler step of the first variation. Y has N entries, updated in place.
void sensitivity_step(const NodePartials& np, int n, int h, double du, const double* dW, double dt, double* Y);

// Source terms of the second variation at a node, for component a.
double second_source(const CoefPartials& d, int a, int n, const double* Yh, const double* Yl, int h, int l,
                     double du_h, double du_l);

// One Euler step of the second variation.
void second_sensitivity_step(const NodePartials& np, int n, int h, int l, double du_h, double du_l,
                             const double* Yh, const double* Yl, const double* dW, double dt, double* Z);

SensitivityEnsemble propagate_sensitivity(const GameSpec& spec, const PathEnsemble& ens, int h,
                                          const ControlProfile& direction, const NoiseBundle& noise);

SecondSensitivityEnsemble propagate_second_sensitivity(const GameSpec& spec, const PathEnsemble& ens,
                                                       const SensitivityEnsemble& Yh,
                                                       const SensitivityEnsemble& Yl, const NoiseBundle& noise);

}  // namespace ag
