#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ag/model/game.hpp"

namespace ag {

// Derived constants feeding the closed-form alpha bounds.
struct BoundLedger {
  int n_players = 0;
  double horizon = 1.0;
  double C = 1.0;             // unspecified outer constant, kept symbolic
  double B0_norm = 0.0;       // L^b + L_y^b (2/N - 1/N^2)
  double Pi0_norm = 0.0;      // L^sigma + L_y^sigma / sqrt(N)
  int drivers = 0;            // drivers whose coefficient matrix can be nonzero
  double apriori = 0.0;       // linear BSDE a-priori constant at max(B0_norm, Pi0_norm)
  Eigen::MatrixXd lambda1;    // per ordered pair
  double C1bs = 0.0, C2bs = 0.0;
};

BoundLedger make_bound_ledger(const ConstantLedger& L, double horizon, int drivers);

double lambda1(const CostGapNorms& g, double apriori, double horizon);

struct PairBound {
  int i = 0, j = 0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0;  // C~0, C~1, C~2 before the 1/N, 1/N^2 scaling
  double lambda1 = 0.0;
  double total = 0.0;  // c0 + c1/N + c2/N^2
};

struct AlphaBound {
  int n_players = 0;
  double C = 1.0;
  Eigen::MatrixXd ctilde;  // ordered pairs, zero diagonal
  std::vector<PairBound> pairs;
  double alpha = 0.0;  // C max_i sum_{j != i} C~(i, j)
  int argmax = 0;
  std::string note;
};

PairBound pair_bound(const ConstantLedger& L, const BoundLedger& B, int i, int j);
AlphaBound theoretical_alpha_bound(const ConstantLedger& L, const BoundLedger& B);

// Reduced pair constant when diffusions are uncontrolled and state free
// (L^sigma = L_y^sigma = 0, drift = bbar + u).
double no_diffusion_pair_bound(const ConstantLedger& L, const BoundLedger& B, int i, int j);

// Pair constant for the linear-quadratic family and the common-noise game:
// (|Q_i - Q_j| + |G_i - G_j|) / N + sqrt(lambda1) / N^2, times C.
double lq_pair_bound(double Qi, double Qj, double Gi, double Gj, int n, double lambda1, double C = 1.0);

// Bound for games whose cost gaps decay like N^-beta, every coefficient
// constant at most L. The a-priori constant and C are taken from B.
struct Cor2Terms {
  double gap_term = 0.0, coupling_term = 0.0, lambda_term = 0.0, total = 0.0;
  double C1bs = 0.0, C2bs = 0.0;
};
Cor2Terms cor2_bound(double L, double L_tilde, double beta, int n, const BoundLedger& B);

// State moment constants for exponent p.
struct MomentConstants {
  double p = 2.0;
  std::vector<double> I0, CX;
  double I1 = 0.0, I2 = 0.0;
};
// xi_moment[i] = E|xi_i|^p, control_norm[i] = E int |u_i|^p dt.
MomentConstants moment_bound_constants(const ConstantLedger& L, double p, const std::vector<double>& xi_moment,
                                       const std::vector<double>& control_norm, double horizon);

struct SensitivityBound {
  double I3 = 0.0, I4 = 0.0, value = 0.0;
};
// sup_t E|Y_i|^p for a perturbation of player h; direction_norm = E int |u'|^p dt.
SensitivityBound sensitivity_moment_bound(const ConstantLedger& L, double p, double direction_norm, double horizon,
                                          int h, int i);

}  // namespace ag
