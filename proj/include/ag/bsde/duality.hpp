#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ag/model/game.hpp"
#include "ag/util/stats.hpp"

namespace ag {

// A matrix Ito process sampled at a node: value, drift, and one diffusion
// matrix per noise driver.
struct MatrixNode {
  Eigen::MatrixXd value, drift;
  std::vector<Eigen::MatrixXd> diffusion;
};

// fill(p, k, node); the drift and diffusion are only read for k < M.
using MatrixProcess = std::function<void(int p, int k, MatrixNode& node)>;

// Sample version of
//   E tr[P_T Y_T] - E tr[P_0 Y_0]
//     - sum_k E tr[drift(P)_k Y_k + P_k drift(Y)_k + sum_j diff_j(P)_k diff_j(Y)_k] dt
// with left-endpoint sums. Returns the mean and its standard error.
Estimate trace_duality_residual(int n_paths, const TimeGrid& grid, const MatrixProcess& P_like,
                                const MatrixProcess& Y_like);

}  // namespace ag
