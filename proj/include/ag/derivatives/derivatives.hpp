#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ag/bsde/adjoint.hpp"
#include "ag/model/controls.hpp"
#include "ag/model/game.hpp"
#include "ag/model/noise.hpp"
#include "ag/sim/paths.hpp"
#include "ag/sim/sensitivity.hpp"
#include "ag/util/stats.hpp"

namespace ag {

enum class Method { fd, sens, bsde, z_oracle };
std::string method_name(Method m);
Method method_from_name(const std::string& s);

struct DerivativeEstimate {
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::fd;
  int i = 0, h = 0, l = -1;
  std::vector<double> eps;  // finite-difference schedule, empty otherwise
};

DerivativeEstimate make_estimate(const std::vector<double>& pathwise, Method m, int i, int h, int l = -1);

// Costs by path and player (left-endpoint running sum plus terminal).
Eigen::MatrixXd pathwise_costs(const GameSpec& spec, const PathEnsemble& ens);
// Same without keeping the ensemble.
Eigen::MatrixXd simulate_costs(const GameSpec& spec, const ControlProfile& ctrl, const NoiseBundle& noise);
std::vector<Estimate> cost_value(const GameSpec& spec, const PathEnsemble& ens);

struct FdOptions {
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
};

// Extrapolation weights removing the eps^2 and eps^4 error terms.
std::vector<double> richardson_weights(const std::vector<double>& eps);

// Pathwise FD first derivatives (n x N, column i = player i's cost) along
// player h's direction.
Eigen::MatrixXd first_fd_pathwise(const GameSpec& spec, const ControlProfile& ctrl, int h, const ControlProfile& dir,
                                  const NoiseBundle& noise, const FdOptions& opts = {});
DerivativeEstimate first_derivative_fd(const GameSpec& spec, const ControlProfile& ctrl, int i, int h,
                                       const ControlProfile& dir, const NoiseBundle& noise, const FdOptions& opts = {});

std::vector<double> first_sens_pathwise(const GameSpec& spec, const PathEnsemble& ens, const SensitivityEnsemble& Y, int i);
DerivativeEstimate first_derivative_sens(const GameSpec& spec, const PathEnsemble& ens, const SensitivityEnsemble& Y, int i);

// Streams the first variation along the paths; n x N for all players at once.
Eigen::MatrixXd first_sens_streaming(const GameSpec& spec, const PathEnsemble& ens, int h, const ControlProfile& dir,
                                     const NoiseBundle& noise);
// Several directions of player h in one pass.
std::vector<Eigen::MatrixXd> first_sens_streaming(const GameSpec& spec, const PathEnsemble& ens, int h,
                                                  const std::vector<ControlProfile>& dirs, const NoiseBundle& noise);

// Pathwise gradient density of player i's cost in every player's control:
// g[p][k][h] = P_{k+1,h} db_h/du + dsigma_h/du (Q^h_k)_h + df_i/du_h.
struct BsdeGradient {
  int player = 0, n_paths = 0, n_players = 0;
  TimeGrid grid;
  std::vector<double> g;
  double at(int p, int k, int h) const {
    return g[(static_cast<size_t>(p) * grid.n_steps + k) * n_players + h];
  }
};
BsdeGradient first_bsde_gradient(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& adj);
std::vector<double> first_bsde_pathwise(const BsdeGradient& grad, const PathEnsemble& ens, int h, const ControlProfile& dir);

std::vector<double> first_bsde_pathwise(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& adj,
                                        int h, const ControlProfile& dir);
DerivativeEstimate first_derivative_bsde(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& adj,
                                         int h, const ControlProfile& dir);

// Mixed second derivative d2 V_i / du_h du_l along (dir_h, dir_l), h != l.
Eigen::MatrixXd second_fd_pathwise(const GameSpec& spec, const ControlProfile& ctrl, int h, const ControlProfile& dir_h,
                                   int l, const ControlProfile& dir_l, const NoiseBundle& noise, const FdOptions& opts = {});
DerivativeEstimate second_derivative_fd(const GameSpec& spec, const ControlProfile& ctrl, int i, int h,
                                        const ControlProfile& dir_h, int l, const ControlProfile& dir_l,
                                        const NoiseBundle& noise, const FdOptions& opts = {});

std::vector<double> second_z_pathwise(const GameSpec& spec, const PathEnsemble& ens, const SensitivityEnsemble& Yh,
                                      const SensitivityEnsemble& Yl, const SecondSensitivityEnsemble& Z, int i);
DerivativeEstimate second_derivative_z_oracle(const GameSpec& spec, const PathEnsemble& ens,
                                              const SensitivityEnsemble& Yh, const SensitivityEnsemble& Yl,
                                              const SecondSensitivityEnsemble& Z, int i);

std::vector<double> second_bsde_pathwise(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& first,
                                         const SecondAdjointSolution& second, const SensitivityEnsemble& Yh,
                                         const SensitivityEnsemble& Yl);
DerivativeEstimate second_derivative_bsde(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& first,
                                          const SecondAdjointSolution& second, const SensitivityEnsemble& Yh,
                                          const SensitivityEnsemble& Yl);

}  // namespace ag
