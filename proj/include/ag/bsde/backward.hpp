#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "ag/bsde/regression.hpp"
#include "ag/model/noise.hpp"
#include "ag/sim/paths.hpp"

namespace ag {

struct StepDiagnostics {
  int basis_size = 0;
  double ridge = 0.0, cond = 0.0, residual_rms = 0.0;
};

// Backward problem on the ensemble grid:
//   y_k = E[y_{k+1} + driver_k dt | F_k],  z^j_k = E[y_{k+1} dW^j_k | F_k] / dt.
// driver(p, k, y_next, z, out) receives y_{k+1} and z_k on path p; z is
// stored driver-major, z[j * dim + c].
struct BackwardProblem {
  int dim = 1;
  std::function<void(int p, double* xi)> terminal;
  std::function<void(int p, int k, const double* y_next, const double* z, double* out)> driver;
  // dim = n * n with row-major symmetric matrices: coefficients are symmetrized
  int symmetric_side = 0;
};

// Fitted backward solution. Values are rebuilt from per-step regression
// coefficients, so the ensemble (and noise) must outlive the solution.
class BsdeSolution {
 public:
  int dim = 0, drivers = 0;
  TimeGrid grid;
  int n_paths = 0;

  // y_k on path p (k = M gives the terminal value).
  void y(int p, int k, double* out) const;
  // z_k on path p, driver-major (d * dim entries), k < M.
  void z(int p, int k, double* out) const;
  Eigen::VectorXd y(int p, int k) const;

  const std::vector<StepDiagnostics>& diagnostics() const { return diag_; }

 private:
  friend BsdeSolution solve_backward(const PathEnsemble&, const NoiseBundle&, const RegressionBasis&,
                                     const BackwardProblem&);
  void features(int p, int k, double* f) const;

  const PathEnsemble* ens_ = nullptr;
  std::shared_ptr<std::vector<double>> levels_;  // Brownian levels when used as features
  int nfeat_ = 0;
  std::vector<SliceBasis> basis_;
  std::vector<Eigen::MatrixXd> cy_, cz_;  // K x dim, K x (d dim)
  std::vector<double> terminal_;          // [p][c]
  std::vector<StepDiagnostics> diag_;
};

BsdeSolution solve_backward(const PathEnsemble& ens, const NoiseBundle& noise, const RegressionBasis& opts,
                            const BackwardProblem& prob);

// Linear BSDE  -dy = (A y + sum_j B^j z^j + f) dt - sum_j z^j dW^j,  y_T = xi.
// Callbacks receive (path, step); missing callbacks mean zero.
struct LinearBsdeSpec {
  int dim = 1;
  std::function<void(int p, double* xi)> terminal;
  std::function<void(int p, int k, Eigen::MatrixXd& A)> A;
  std::function<void(int p, int k, int j, Eigen::MatrixXd& B)> B;
  std::function<void(int p, int k, double* f)> forcing;
};

BsdeSolution solve_linear_bsde(const LinearBsdeSpec& spec, const PathEnsemble& ens, const NoiseBundle& noise,
                               const RegressionBasis& opts = {});

// Constant of the a-priori estimate for coefficient norm C1, d drivers, horizon T.
double apriori_constant(double C1, int d, double T);

struct AprioriCheck {
  double lhs = 0.0, rhs = 0.0, ratio = 0.0, constant = 0.0, C1 = 0.0;
};

AprioriCheck apriori_bound_check(const LinearBsdeSpec& spec, const BsdeSolution& sol, const PathEnsemble& ens);

}  // namespace ag
