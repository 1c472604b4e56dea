#include "ag/model/fd_wrapper.hpp"

#include <vector>

namespace ag {

namespace {

// Generic gradient and Hessian of g over a packed argument vector z.
template <class G>
void fd_derivs(const G& g, std::vector<double> z, double h, bool second, Eigen::VectorXd& grad, Eigen::MatrixXd& hess) {
  const int m = static_cast<int>(z.size());
  grad.resize(m);
  double g0 = g(z);
  for (int a = 0; a < m; ++a) {
    double za = z[a];
    z[a] = za + h;
    double gp = g(z);
    z[a] = za - h;
    double gm = g(z);
    z[a] = za;
    grad[a] = (gp - gm) / (2 * h);
    if (second) hess(a, a) = (gp - 2 * g0 + gm) / (h * h);
  }
  if (!second) return;
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      double za = z[a], zb = z[b];
      auto at = [&](double sa, double sb) {
        z[a] = za + sa * h;
        z[b] = zb + sb * h;
        double v = g(z);
        z[a] = za;
        z[b] = zb;
        return v;
      };
      double v = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * h * h);
      hess(a, b) = hess(b, a) = v;
    }
}

}  // namespace

void FdStateCoefficient::eval(int i, double t, double x, const double* y, double u, Order order, CoefPartials& out) const {
  out.v = fn_(i, t, x, y, u);
  if (order == Order::value) return;
  // packed z = (x, u, y...)
  std::vector<double> z(2 + n_);
  z[0] = x;
  z[1] = u;
  for (int a = 0; a < n_; ++a) z[2 + a] = y[a];
  auto g = [&](const std::vector<double>& w) { return fn_(i, t, w[0], w.data() + 2, w[1]); };
  bool second = order == Order::second;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 + n_, 2 + n_);
  fd_derivs(g, z, h_, second, grad, hess);
  out.dx = grad[0];
  out.du = grad[1];
  out.dy = grad.tail(n_);
  if (!second) return;
  out.dxx = hess(0, 0);
  out.dxu = hess(0, 1);
  out.duu = hess(1, 1);
  out.dxy = hess.row(0).tail(n_).transpose();
  out.duy = hess.row(1).tail(n_).transpose();
  out.dyy = hess.bottomRightCorner(n_, n_);
}

void FdRunningCost::eval(int i, double t, const double* y, const double* u, Order order, CostPartials& out) const {
  out.v = fn_(i, t, y, u);
  if (order == Order::value) return;
  std::vector<double> z(2 * n_);
  for (int a = 0; a < n_; ++a) {
    z[a] = y[a];
    z[n_ + a] = u[a];
  }
  auto g = [&](const std::vector<double>& w) { return fn_(i, t, w.data(), w.data() + n_); };
  bool second = order == Order::second;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(2 * n_, 2 * n_);
  fd_derivs(g, z, h_, second, grad, hess);
  out.dy = grad.head(n_);
  out.du = grad.tail(n_);
  if (!second) return;
  out.dyy = hess.topLeftCorner(n_, n_);
  out.dyu = hess.topRightCorner(n_, n_);
  out.duu = hess.bottomRightCorner(n_, n_);
}

void FdTerminalCost::eval(int i, const double* y, Order order, CostPartials& out) const {
  out.v = fn_(i, y);
  if (order == Order::value) return;
  std::vector<double> z(y, y + n_);
  auto g = [&](const std::vector<double>& w) { return fn_(i, w.data()); };
  bool second = order == Order::second;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(n_, n_);
  fd_derivs(g, z, h_, second, grad, hess);
  out.dy = grad;
  if (second) out.dyy = hess;
}

}  // namespace ag
