#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ag {

struct RegressionBasis {
  int degree = 2;  // total degree of the monomials
  double ridge = 1e-8;
  double ridge_max = 1e-2;
  double cond_max = 1e12;
  bool noise_levels = false;  // add Brownian levels as features
};

// Monomials of total degree <= degree in standardized features. Features
// with no spread on the slice are dropped.
class SliceBasis {
 public:
  void fit(const Eigen::MatrixXd& feats, int degree);
  int size() const { return size_; }
  void eval(const double* feat, double* out) const;
  Eigen::MatrixXd design(const Eigen::MatrixXd& feats) const;

 private:
  int degree_ = 1, size_ = 1;
  std::vector<int> kept_;
  std::vector<double> center_, scale_;
};

// Least squares on a design matrix with ridge chosen to keep the normalized
// Gram matrix conditioned below cond_max.
class SliceRegression {
 public:
  SliceRegression(const Eigen::MatrixXd& design, const RegressionBasis& opts, int step);
  // K x m coefficients for n x m targets.
  Eigen::MatrixXd coefficients(const Eigen::MatrixXd& targets) const;
  double ridge() const { return ridge_; }
  double cond() const { return cond_; }

 private:
  const Eigen::MatrixXd& design_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt_;
  double ridge_ = 0.0, cond_ = 0.0;
};

// Phi^T T / n, reduced over fixed path blocks.
Eigen::MatrixXd block_cross(const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& T);

}  // namespace ag
