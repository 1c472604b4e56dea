#include "ag/bsde/regression.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "ag/util/parallel.hpp"

namespace ag {

void SliceBasis::fit(const Eigen::MatrixXd& feats, int degree) {
  if (degree < 1 || degree > 2) throw std::invalid_argument("regression degree must be 1 or 2");
  degree_ = degree;
  kept_.clear();
  center_.clear();
  scale_.clear();
  const double n = static_cast<double>(feats.rows());
  for (int c = 0; c < feats.cols(); ++c) {
    double m = feats.col(c).sum() / n;
    double v = (feats.col(c).array() - m).square().sum() / n;
    double sd = std::sqrt(v);
    if (sd > 1e-10 * (1.0 + std::abs(m))) {
      kept_.push_back(c);
      center_.push_back(m);
      scale_.push_back(sd);
    }
  }
  const int q = static_cast<int>(kept_.size());
  size_ = 1 + q + (degree_ == 2 ? q * (q + 1) / 2 : 0);
}

void SliceBasis::eval(const double* feat, double* out) const {
  const int q = static_cast<int>(kept_.size());
  out[0] = 1.0;
  double zbuf[256];
  std::vector<double> big;
  double* z = zbuf;
  if (q > 256) {
    big.resize(q);
    z = big.data();
  }
  for (int a = 0; a < q; ++a) {
    z[a] = (feat[kept_[a]] - center_[a]) / scale_[a];
    out[1 + a] = z[a];
  }
  if (degree_ == 2) {
    int idx = 1 + q;
    for (int a = 0; a < q; ++a)
      for (int b = a; b < q; ++b) out[idx++] = z[a] * z[b];
  }
}

Eigen::MatrixXd SliceBasis::design(const Eigen::MatrixXd& feats) const {
  // row-major fill, then transpose view into column-major storage
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> Phi(feats.rows(), size_);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> F = feats;
  for_blocks(static_cast<int>(feats.rows()), [&](int, int b, int e) {
    for (int p = b; p < e; ++p) eval(F.row(p).data(), Phi.row(p).data());
  });
  return Phi;
}

Eigen::MatrixXd block_cross(const Eigen::MatrixXd& Phi, const Eigen::MatrixXd& T) {
  const int n = static_cast<int>(Phi.rows());
  const int nb = block_count(n);
  std::vector<Eigen::MatrixXd> part(nb);
  for_blocks(n, [&](int blk, int b, int e) {
    part[blk].noalias() = Phi.middleRows(b, e - b).transpose() * T.middleRows(b, e - b);
  });
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(Phi.cols(), T.cols());
  for (int blk = 0; blk < nb; ++blk) out += part[blk];
  return out / static_cast<double>(n);
}

SliceRegression::SliceRegression(const Eigen::MatrixXd& design, const RegressionBasis& opts, int step)
    : design_(design) {
  Eigen::MatrixXd G = block_cross(design, design);
  G = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G, Eigen::EigenvaluesOnly);
  double lmax = es.eigenvalues().maxCoeff();
  double lmin = std::max(0.0, es.eigenvalues().minCoeff());
  double lam = opts.ridge;
  for (;;) {
    cond_ = (lmax + lam) / (lmin + lam);
    if (cond_ <= opts.cond_max) break;
    lam *= 10.0;
    if (lam > opts.ridge_max * (1.0 + 1e-12))
      throw std::runtime_error("regression Gram matrix is singular at step " + std::to_string(step) +
                               " (condition " + std::to_string(cond_) + ")");
  }
  ridge_ = lam;
  G.diagonal().array() += lam;
  ldlt_.compute(G);
  if (ldlt_.info() != Eigen::Success) throw std::runtime_error("regression factorization failed at step " + std::to_string(step));
}

Eigen::MatrixXd SliceRegression::coefficients(const Eigen::MatrixXd& targets) const {
  return ldlt_.solve(block_cross(design_, targets));
}

}  // namespace ag
