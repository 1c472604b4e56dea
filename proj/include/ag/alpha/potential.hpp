#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ag/bsde/regression.hpp"
#include "ag/model/controls.hpp"
#include "ag/model/game.hpp"
#include "ag/model/noise.hpp"
#include "ag/util/stats.hpp"

namespace ag {

struct PotentialOptions {
  int order = 8;  // Gauss-Legendre nodes on [0, 1]
  RegressionBasis basis;
};

struct PotentialEstimate {
  double value = 0.0, se = 0.0;
  std::vector<double> pathwise;
};

// Line integral from the anchor z to the profile a of the own-control
// derivatives, each evaluated through the first adjoint.
PotentialEstimate potential_value(const GameSpec& spec, const ControlProfile& anchor, const ControlProfile& a,
                                  const NoiseBundle& noise, const PotentialOptions& opts = {});

// a with player i's component taken from b.
ControlProfile unilateral(const ControlProfile& a, int i, const ControlProfile& b);

struct DeviationGap {
  double gap = 0.0, se = 0.0;  // |dV_i - dPhi| and the SE of the pathwise difference
  Estimate dV, dPhi;
};

DeviationGap potential_deviation_gap(const GameSpec& spec, const ControlProfile& a, int i,
                                     const ControlProfile& deviation, const ControlProfile& anchor,
                                     const NoiseBundle& noise, const PotentialOptions& opts = {});

// Unilateral deviations of one player.
struct Deviation {
  int player = 0;
  ControlProfile profile;  // only the player's component is used
};

struct Exploitability {
  double value = 0.0, se = 0.0;  // max over players and deviations of the positive part of the gain
  int player = 0, deviation = -1;
  std::vector<Estimate> gains;  // per deviation, signed
};

Exploitability exploitability(const GameSpec& spec, const ControlProfile& a, const std::vector<Deviation>& devs,
                              const NoiseBundle& noise);

// Every player uses sum_k theta[i K + k] shape_k.
ControlProfile family_profile(int n, double horizon, const std::vector<Shape>& family, const Eigen::VectorXd& theta);

struct FamilyMinimizer {
  std::vector<Shape> family;
  Eigen::VectorXd theta;     // n K parameters
  Eigen::VectorXd gradient;  // own-control gradient at theta
  Eigen::MatrixXd jacobian;  // of the gradient map
  double eps_opt = 0.0;      // quadratic-model suboptimality 1/2 g^T J^-1 g
  int iterations = 0;
};

// Newton iterations on the stacked own-control gradient (the gradient of the
// potential in a potential game). Jacobian columns from forward differences
// with the given step.
FamilyMinimizer minimize_potential_family(const GameSpec& spec, const std::vector<Shape>& family,
                                          const NoiseBundle& noise, int max_iter = 4, double step = 1.0,
                                          double tol = 1e-10);

// Own-control gradient and Jacobian of the family map at theta.
void family_gradient(const GameSpec& spec, const std::vector<Shape>& family, const Eigen::VectorXd& theta,
                     const NoiseBundle& noise, Eigen::VectorXd& g);

}  // namespace ag
