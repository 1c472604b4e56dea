#pragma once

#include <Eigen/Dense>

#include "ag/model/game.hpp"

namespace ag {

// Linear-quadratic game
//   drift_i     = A_i x + Abar_i mean(y) + B_i u + b_i
//   diffusion_i = C_i x + Cbar_i mean(y) + D_i u + sigma_i
//   running_i   = (Q_i (y_i - mean(y))^2 + R_i u_i^2) / 2
//   terminal_i  = G_i (y_i - mean(y))^2 / 2
struct LqParams {
  int n = 2;
  double horizon = 1.0;
  Eigen::VectorXd A, Abar, B, b, C, Cbar, D, sigma, Q, R, G;
  Eigen::VectorXd x0_mean, x0_std;

  // Identical players.
  static LqParams symmetric(int n);
  // Player parameters spread linearly around the symmetric values.
  static LqParams heterogeneous(int n, double spread = 1.0);
  void check() const;
};

// Mean-field game: coefficients see the state vector through its average.
//   drift_i     = -a_i x + theta_i tanh(mean) + B_i u
//   diffusion_i = s_i + zeta_i tanh(mean)
//   running_i   = q var(y)/2 + r_i u_i^2/2 + kappa_i mean^2/2
//   terminal_i  = G var(y)/2 + gamma_i mean^2/2
struct MeanFieldParams {
  int n = 2;
  double horizon = 1.0;
  Eigen::VectorXd a, theta, B, s, zeta, r, kappa, gamma;
  double q = 1.0, G = 1.0;
  Eigen::VectorXd x0_mean, x0_std;

  static MeanFieldParams heterogeneous(int n, double spread = 1.0);
  void check() const;
};

// Players driven by their own noise plus a shared Brownian motion:
//   dX_i = bb_i u_i dt + sigma_i dW_i + dW_0, LQ costs as above.
struct CommonNoiseParams {
  int n = 2;
  double horizon = 1.0;
  Eigen::VectorXd bb, sigma, Q, R, G;
  Eigen::VectorXd x0_mean, x0_std;

  static CommonNoiseParams identical_costs(int n);
  static CommonNoiseParams heterogeneous(int n, double spread = 1.0);
  void check() const;
};

// Smooth nonlinear game with tanh couplings; m = mean(y), ubar = mean(u).
//   drift_i     = -kappa_i x + beta_i tanh(m - x) + u (B_i + eta_i tanh(x + m))
//   diffusion_i = vs_i + gam_i tanh(x) + zeta_i tanh(m) + u (D_i + omega_i tanh(x))
//   running_i   = q_i (y_i - m)^2/2 + r_i u_i^2/2 + e_i u_i tanh(m) + c_i ubar^2/2
//   terminal_i  = G_i (y_i - m)^2/2 + tau_i log cosh(y_i)
// Ledger constants hold for |u| <= control_bound.
struct TanhParams {
  int n = 3;
  double horizon = 1.0;
  Eigen::VectorXd kappa, beta, B, eta, vs, gam, zeta, D, omega, q, r, e, c, G, tau;
  Eigen::VectorXd x0_mean, x0_std;
  double control_bound = 2.0;

  static TanhParams gentle(int n);
  void check() const;
};

GameWithLedger build_lq_game(const LqParams& p);
GameWithLedger build_mean_field_game(const MeanFieldParams& p);
GameWithLedger build_common_noise_game(const CommonNoiseParams& p);
GameWithLedger build_tanh_game(const TanhParams& p);

}  // namespace ag
