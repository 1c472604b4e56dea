#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ag/bsde/regression.hpp"
#include "ag/derivatives/derivatives.hpp"
#include "ag/model/controls.hpp"
#include "ag/model/game.hpp"
#include "ag/model/noise.hpp"

namespace ag {

// sup over direction pairs (a for player i, b for player j) of
// |d2V_i/du_i du_j (a, b) - d2V_j/du_j du_i (b, a)|.
struct PairAsymmetry {
  int i = 0, j = 1;
  double value = 0.0, se = 0.0;
  // Same sup after dividing by the H2 norms of the two directions.
  double normalized = 0.0, normalized_se = 0.0;
  Shape a = Shape::one, b = Shape::one;
};

struct AsymmetryMatrix {
  int n_players = 0;
  Method method = Method::z_oracle;
  Eigen::MatrixXd value, se, normalized, normalized_se;  // symmetric, zero diagonal
  std::vector<PairAsymmetry> pairs;                     // i < j

  void resize(int n);
  void set(const PairAsymmetry& pa);
  // 2 max_i sum_{j != i} value(i, j), with the SE of the maximizing row.
  Estimate alpha(int* argmax = nullptr) const;
};

struct AsymmetryOptions {
  FdOptions fd;
  RegressionBasis basis;
};

// L2(dt x dP) norm of a deterministic shape on the grid (left endpoints).
double direction_norm(Shape s, const TimeGrid& grid);

// One pair by finite differences or by the second-order adjoints.
PairAsymmetry asymmetry(const GameSpec& spec, const ControlProfile& ctrl, int i, int j,
                        const std::vector<Shape>& dict, const NoiseBundle& noise, Method method,
                        const AsymmetryOptions& opts = {});

// All pairs. Z-ORACLE streams every sensitivity along each path and is the
// only route that scales to larger N; FD and BSDE loop over pairs.
AsymmetryMatrix asymmetry_matrix(const GameSpec& spec, const ControlProfile& ctrl, const std::vector<Shape>& dict,
                                 const NoiseBundle& noise, Method method, const AsymmetryOptions& opts = {});

struct EmpiricalAlpha {
  double value = 0.0, se = 0.0;
  int player = 0;         // row attaining the max
  int control_index = 0;  // control attaining the max
  std::vector<AsymmetryMatrix> per_control;
  // Entrywise sup over controls.
  AsymmetryMatrix sup;
};

// Lower estimate of alpha over a finite set of controls and directions.
EmpiricalAlpha empirical_alpha(const GameSpec& spec, const std::vector<ControlProfile>& controls,
                               const std::vector<Shape>& dict, const NoiseBundle& noise, Method method,
                               const AsymmetryOptions& opts = {});

}  // namespace ag
