#include "ag/model/presets.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ag {

namespace {

using Eigen::VectorXd;

double mean_of(const double* y, int n) {
  double s = 0.0;
  for (int k = 0; k < n; ++k) s += y[k];
  return s / n;
}

// sup |d2/dz2 tanh(z)|
const double kTanh2 = 4.0 / (3.0 * std::sqrt(3.0));

void need(const VectorXd& v, int n, const char* name) {
  if (v.size() != n) throw std::invalid_argument(std::string("parameter '") + name + "' needs one entry per player");
  if (!v.allFinite()) throw std::invalid_argument(std::string("parameter '") + name + "' is not finite");
}

VectorXd spread_vec(int n, double base, double width) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) {
    double r = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1) - 0.5;
    v[i] = base + width * r;
  }
  return v;
}

InitialLaw make_initial(const VectorXd& mean, const VectorXd& sd, int n) {
  need(mean, n, "x0_mean");
  need(sd, n, "x0_std");
  return InitialLaw{mean, sd};
}

// a x + abar mean(y) + bu u + c
class LinearCoefficient : public StateCoefficient {
 public:
  LinearCoefficient(VectorXd a, VectorXd abar, VectorXd bu, VectorXd c)
      : a_(std::move(a)), abar_(std::move(abar)), bu_(std::move(bu)), c_(std::move(c)), n_(static_cast<int>(a_.size())) {}
  double value(int i, double, double x, const double* y, double u) const override {
    return a_[i] * x + abar_[i] * mean_of(y, n_) + bu_[i] * u + c_[i];
  }
  void eval(int i, double t, double x, const double* y, double u, Order order, CoefPartials& out) const override {
    out.v = value(i, t, x, y, u);
    if (order == Order::value) return;
    out.dx = a_[i];
    out.du = bu_[i];
    out.dy.setConstant(abar_[i] / n_);
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double m = mean_of(y, n_);
    for (int i = 0; i < n_; ++i) out[i] = a_[i] * y[i] + abar_[i] * m + bu_[i] * u[i] + c_[i];
  }
  bool curved() const override { return false; }

 private:
  VectorXd a_, abar_, bu_, c_;
  int n_;
};

// ax x + th tanh(mean(y)) + bu u + c
class MeanTanhCoefficient : public StateCoefficient {
 public:
  MeanTanhCoefficient(VectorXd ax, VectorXd th, VectorXd bu, VectorXd c)
      : ax_(std::move(ax)), th_(std::move(th)), bu_(std::move(bu)), c_(std::move(c)), n_(static_cast<int>(ax_.size())) {}
  double value(int i, double, double x, const double* y, double u) const override {
    return ax_[i] * x + th_[i] * std::tanh(mean_of(y, n_)) + bu_[i] * u + c_[i];
  }
  void eval(int i, double, double x, const double* y, double u, Order order, CoefPartials& out) const override {
    double m = mean_of(y, n_);
    double w = std::tanh(m);
    out.v = ax_[i] * x + th_[i] * w + bu_[i] * u + c_[i];
    if (order == Order::value) return;
    double w1 = 1.0 - w * w;
    out.dx = ax_[i];
    out.du = bu_[i];
    out.dy.setConstant(th_[i] * w1 / n_);
    if (order == Order::first) return;
    out.dyy.setConstant(th_[i] * (-2.0 * w * w1) / (double(n_) * n_));
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double w = std::tanh(mean_of(y, n_));
    for (int i = 0; i < n_; ++i) out[i] = ax_[i] * y[i] + th_[i] * w + bu_[i] * u[i] + c_[i];
  }
  bool curved() const override { return th_.cwiseAbs().maxCoeff() > 0.0; }

 private:
  VectorXd ax_, th_, bu_, c_;
  int n_;
};

// (Q_i (y_i - m)^2 + R_i u_i^2) / 2
class DeviationRunning : public RunningCost {
 public:
  DeviationRunning(VectorXd Q, VectorXd R) : Q_(std::move(Q)), R_(std::move(R)), n_(static_cast<int>(Q_.size())) {}
  double value(int i, double, const double* y, const double* u) const override {
    double d = y[i] - mean_of(y, n_);
    return 0.5 * (Q_[i] * d * d + R_[i] * u[i] * u[i]);
  }
  void eval(int i, double t, const double* y, const double* u, Order order, CostPartials& out) const override {
    out.v = value(i, t, y, u);
    if (order == Order::value) return;
    double d = y[i] - mean_of(y, n_);
    for (int k = 0; k < n_; ++k) out.dy[k] = Q_[i] * d * ((k == i) - 1.0 / n_);
    out.du[i] = R_[i] * u[i];
    if (order == Order::first) return;
    for (int k = 0; k < n_; ++k)
      for (int l = 0; l < n_; ++l) out.dyy(k, l) = Q_[i] * ((k == i) - 1.0 / n_) * ((l == i) - 1.0 / n_);
    out.duu(i, i) = R_[i];
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double m = mean_of(y, n_);
    for (int i = 0; i < n_; ++i) out[i] = 0.5 * (Q_[i] * (y[i] - m) * (y[i] - m) + R_[i] * u[i] * u[i]);
  }

 private:
  VectorXd Q_, R_;
  int n_;
};

class DeviationTerminal : public TerminalCost {
 public:
  explicit DeviationTerminal(VectorXd G) : G_(std::move(G)), n_(static_cast<int>(G_.size())) {}
  double value(int i, const double* y) const override {
    double d = y[i] - mean_of(y, n_);
    return 0.5 * G_[i] * d * d;
  }
  void eval(int i, const double* y, Order order, CostPartials& out) const override {
    out.v = value(i, y);
    if (order == Order::value) return;
    double d = y[i] - mean_of(y, n_);
    for (int k = 0; k < n_; ++k) out.dy[k] = G_[i] * d * ((k == i) - 1.0 / n_);
    if (order == Order::first) return;
    for (int k = 0; k < n_; ++k)
      for (int l = 0; l < n_; ++l) out.dyy(k, l) = G_[i] * ((k == i) - 1.0 / n_) * ((l == i) - 1.0 / n_);
  }
  void values(int, const double* y, double* out) const override {
    double m = mean_of(y, n_);
    for (int i = 0; i < n_; ++i) out[i] = 0.5 * G_[i] * (y[i] - m) * (y[i] - m);
  }

 private:
  VectorXd G_;
  int n_;
};

// q var(y)/2 + r_i u_i^2/2 + kappa_i m^2/2
class MeanFieldRunning : public RunningCost {
 public:
  MeanFieldRunning(double q, VectorXd r, VectorXd kappa) : q_(q), r_(std::move(r)), k_(std::move(kappa)), n_(static_cast<int>(r_.size())) {}
  double value(int i, double, const double* y, const double* u) const override {
    double m = mean_of(y, n_), v = 0.0;
    for (int a = 0; a < n_; ++a) v += (y[a] - m) * (y[a] - m);
    v /= n_;
    return 0.5 * q_ * v + 0.5 * r_[i] * u[i] * u[i] + 0.5 * k_[i] * m * m;
  }
  void eval(int i, double t, const double* y, const double* u, Order order, CostPartials& out) const override {
    out.v = value(i, t, y, u);
    if (order == Order::value) return;
    double m = mean_of(y, n_);
    for (int a = 0; a < n_; ++a) out.dy[a] = q_ * (y[a] - m) / n_ + k_[i] * m / n_;
    out.du[i] = r_[i] * u[i];
    if (order == Order::first) return;
    double nn = double(n_) * n_;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) out.dyy(a, b) = q_ * ((a == b) / double(n_) - 1.0 / nn) + k_[i] / nn;
    out.duu(i, i) = r_[i];
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double m = mean_of(y, n_), v = 0.0;
    for (int a = 0; a < n_; ++a) v += (y[a] - m) * (y[a] - m);
    v /= n_;
    for (int i = 0; i < n_; ++i) out[i] = 0.5 * q_ * v + 0.5 * r_[i] * u[i] * u[i] + 0.5 * k_[i] * m * m;
  }

 private:
  double q_;
  VectorXd r_, k_;
  int n_;
};

class MeanFieldTerminal : public TerminalCost {
 public:
  MeanFieldTerminal(double G, VectorXd gamma) : G_(G), g_(std::move(gamma)), n_(static_cast<int>(g_.size())) {}
  double value(int i, const double* y) const override {
    double m = mean_of(y, n_), v = 0.0;
    for (int a = 0; a < n_; ++a) v += (y[a] - m) * (y[a] - m);
    v /= n_;
    return 0.5 * G_ * v + 0.5 * g_[i] * m * m;
  }
  void eval(int i, const double* y, Order order, CostPartials& out) const override {
    out.v = value(i, y);
    if (order == Order::value) return;
    double m = mean_of(y, n_);
    for (int a = 0; a < n_; ++a) out.dy[a] = G_ * (y[a] - m) / n_ + g_[i] * m / n_;
    if (order == Order::first) return;
    double nn = double(n_) * n_;
    for (int a = 0; a < n_; ++a)
      for (int b = 0; b < n_; ++b) out.dyy(a, b) = G_ * ((a == b) / double(n_) - 1.0 / nn) + g_[i] / nn;
  }
  void values(int, const double* y, double* out) const override {
    double m = mean_of(y, n_), v = 0.0;
    for (int a = 0; a < n_; ++a) v += (y[a] - m) * (y[a] - m);
    v /= n_;
    for (int i = 0; i < n_; ++i) out[i] = 0.5 * G_ * v + 0.5 * g_[i] * m * m;
  }

 private:
  double G_;
  VectorXd g_;
  int n_;
};

class TanhDrift : public StateCoefficient {
 public:
  explicit TanhDrift(const TanhParams& p) : p_(p) {}
  double value(int i, double, double x, const double* y, double u) const override {
    double m = mean_of(y, p_.n);
    return -p_.kappa[i] * x + p_.beta[i] * std::tanh(m - x) + u * (p_.B[i] + p_.eta[i] * std::tanh(x + m));
  }
  void eval(int i, double, double x, const double* y, double u, Order order, CoefPartials& out) const override {
    const double N = p_.n;
    double m = mean_of(y, p_.n);
    double s = std::tanh(m - x), w = std::tanh(x + m);
    double kap = p_.kappa[i], be = p_.beta[i], eta = p_.eta[i];
    out.v = -kap * x + be * s + u * (p_.B[i] + eta * w);
    if (order == Order::value) return;
    double s1 = 1 - s * s, w1 = 1 - w * w;
    out.dx = -kap - be * s1 + u * eta * w1;
    out.du = p_.B[i] + eta * w;
    out.dy.setConstant((be * s1 + u * eta * w1) / N);
    if (order == Order::first) return;
    double s2 = -2 * s * s1, w2 = -2 * w * w1;
    out.dxx = be * s2 + u * eta * w2;
    out.dxu = eta * w1;
    out.duu = 0.0;
    out.dxy.setConstant((-be * s2 + u * eta * w2) / N);
    out.duy.setConstant(eta * w1 / N);
    out.dyy.setConstant((be * s2 + u * eta * w2) / (N * N));
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double m = mean_of(y, p_.n);
    for (int i = 0; i < p_.n; ++i) {
      double x = y[i];
      out[i] = -p_.kappa[i] * x + p_.beta[i] * std::tanh(m - x) + u[i] * (p_.B[i] + p_.eta[i] * std::tanh(x + m));
    }
  }

 private:
  TanhParams p_;
};

class TanhDiffusion : public StateCoefficient {
 public:
  explicit TanhDiffusion(const TanhParams& p) : p_(p) {}
  double value(int i, double, double x, const double* y, double u) const override {
    double m = mean_of(y, p_.n);
    double a = std::tanh(x);
    return p_.vs[i] + p_.gam[i] * a + p_.zeta[i] * std::tanh(m) + u * (p_.D[i] + p_.omega[i] * a);
  }
  void eval(int i, double, double x, const double* y, double u, Order order, CoefPartials& out) const override {
    const double N = p_.n;
    double m = mean_of(y, p_.n);
    double a = std::tanh(x), c = std::tanh(m);
    double ga = p_.gam[i], ze = p_.zeta[i], om = p_.omega[i];
    out.v = p_.vs[i] + ga * a + ze * c + u * (p_.D[i] + om * a);
    if (order == Order::value) return;
    double a1 = 1 - a * a, c1 = 1 - c * c;
    out.dx = ga * a1 + u * om * a1;
    out.du = p_.D[i] + om * a;
    out.dy.setConstant(ze * c1 / N);
    if (order == Order::first) return;
    double a2 = -2 * a * a1, c2 = -2 * c * c1;
    out.dxx = ga * a2 + u * om * a2;
    out.dxu = om * a1;
    out.duu = 0.0;
    out.dxy.setZero();
    out.duy.setZero();
    out.dyy.setConstant(ze * c2 / (N * N));
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double c = std::tanh(mean_of(y, p_.n));
    for (int i = 0; i < p_.n; ++i) {
      double a = std::tanh(y[i]);
      out[i] = p_.vs[i] + p_.gam[i] * a + p_.zeta[i] * c + u[i] * (p_.D[i] + p_.omega[i] * a);
    }
  }

 private:
  TanhParams p_;
};

class TanhRunning : public RunningCost {
 public:
  explicit TanhRunning(const TanhParams& p) : p_(p) {}
  double value(int i, double, const double* y, const double* u) const override {
    double m = mean_of(y, p_.n), ub = mean_of(u, p_.n);
    double d = y[i] - m;
    return 0.5 * p_.q[i] * d * d + 0.5 * p_.r[i] * u[i] * u[i] + p_.e[i] * u[i] * std::tanh(m) + 0.5 * p_.c[i] * ub * ub;
  }
  void eval(int i, double t, const double* y, const double* u, Order order, CostPartials& out) const override {
    const int n = p_.n;
    const double N = n;
    out.v = value(i, t, y, u);
    if (order == Order::value) return;
    double m = mean_of(y, n), ub = mean_of(u, n);
    double d = y[i] - m, w = std::tanh(m), w1 = 1 - w * w;
    for (int k = 0; k < n; ++k) {
      out.dy[k] = p_.q[i] * d * ((k == i) - 1.0 / N) + p_.e[i] * u[i] * w1 / N;
      out.du[k] = p_.c[i] * ub / N;
    }
    out.du[i] += p_.r[i] * u[i] + p_.e[i] * w;
    if (order == Order::first) return;
    double w2 = -2 * w * w1;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        out.dyy(k, l) = p_.q[i] * ((k == i) - 1.0 / N) * ((l == i) - 1.0 / N) + p_.e[i] * u[i] * w2 / (N * N);
        out.duu(k, l) = p_.c[i] / (N * N);
        out.dyu(k, l) = l == i ? p_.e[i] * w1 / N : 0.0;
      }
    out.duu(i, i) += p_.r[i];
  }
  void values(int, double, const double* y, const double* u, double* out) const override {
    double m = mean_of(y, p_.n), ub = mean_of(u, p_.n), w = std::tanh(m);
    for (int i = 0; i < p_.n; ++i) {
      double d = y[i] - m;
      out[i] = 0.5 * p_.q[i] * d * d + 0.5 * p_.r[i] * u[i] * u[i] + p_.e[i] * u[i] * w + 0.5 * p_.c[i] * ub * ub;
    }
  }

 private:
  TanhParams p_;
};

class TanhTerminal : public TerminalCost {
 public:
  explicit TanhTerminal(const TanhParams& p) : p_(p) {}
  double value(int i, const double* y) const override {
    double d = y[i] - mean_of(y, p_.n);
    return 0.5 * p_.G[i] * d * d + p_.tau[i] * std::log(std::cosh(y[i]));
  }
  void eval(int i, const double* y, Order order, CostPartials& out) const override {
    const int n = p_.n;
    const double N = n;
    out.v = value(i, y);
    if (order == Order::value) return;
    double d = y[i] - mean_of(y, n), th = std::tanh(y[i]);
    for (int k = 0; k < n; ++k) out.dy[k] = p_.G[i] * d * ((k == i) - 1.0 / N);
    out.dy[i] += p_.tau[i] * th;
    if (order == Order::first) return;
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) out.dyy(k, l) = p_.G[i] * ((k == i) - 1.0 / N) * ((l == i) - 1.0 / N);
    out.dyy(i, i) += p_.tau[i] * (1 - th * th);
  }

 private:
  TanhParams p_;
};

// Exact gap norms for (weight_i a_i a_i^T - weight_j a_j a_j^T), a_i = e_i - 1/N.
Eigen::MatrixXd deviation_gap(const VectorXd& w, int i, int j) {
  const int n = static_cast<int>(w.size());
  Eigen::MatrixXd out(n, n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      double ai = ((k == i) - 1.0 / n) * ((l == i) - 1.0 / n);
      double aj = ((k == j) - 1.0 / n) * ((l == j) - 1.0 / n);
      out(k, l) = std::abs(w[i] * ai - w[j] * aj);
    }
  return out;
}

void deviation_ledger(const VectorXd& Q, const VectorXd& R, const VectorXd& G, ConstantLedger& L) {
  const int n = static_cast<int>(Q.size());
  L.n_players = n;
  L.sampled = false;
  L.gaps.assign(static_cast<size_t>(n) * n, CostGapNorms{});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CostGapNorms& g = L.gap(i, j);
      g.resize(n);
      if (i == j) continue;
      g.fxx = deviation_gap(Q, i, j);
      g.gxx = deviation_gap(G, i, j);
      g.fuu(i, i) = std::abs(R[i]);
      g.fuu(j, j) = std::abs(R[j]);
    }
}

}  // namespace

LqParams LqParams::symmetric(int n) {
  if (n < 1) throw std::invalid_argument("lq: need players");
  LqParams p;
  p.n = n;
  auto c = [n](double v) { return VectorXd::Constant(n, v); };
  p.A = c(-0.3);
  p.Abar = c(0.2);
  p.B = c(1.0);
  p.b = c(0.0);
  p.C = c(0.1);
  p.Cbar = c(0.1);
  p.D = c(0.2);
  p.sigma = c(0.3);
  p.Q = c(1.0);
  p.R = c(1.0);
  p.G = c(0.5);
  p.x0_mean = c(0.0);
  p.x0_std = c(0.3);
  return p;
}

LqParams LqParams::heterogeneous(int n, double spread) {
  LqParams p = symmetric(n);
  p.A = spread_vec(n, -0.3, 0.4 * spread);
  p.Q = spread_vec(n, 1.0, 0.8 * spread);
  p.G = spread_vec(n, 0.5, 0.4 * spread);
  p.R = spread_vec(n, 1.0, 0.4 * spread);
  p.x0_mean = spread_vec(n, 0.0, 0.6 * spread);
  return p;
}

void LqParams::check() const {
  if (n < 1) throw std::invalid_argument("lq: need players");
  if (!(horizon > 0)) throw std::invalid_argument("lq: horizon must be positive");
  need(A, n, "A"), need(Abar, n, "Abar"), need(B, n, "B"), need(b, n, "b"), need(C, n, "C"), need(Cbar, n, "Cbar");
  need(D, n, "D"), need(sigma, n, "sigma"), need(Q, n, "Q"), need(R, n, "R"), need(G, n, "G");
  for (int i = 0; i < n; ++i)
    if (Q[i] < 0 || R[i] <= 0 || G[i] < 0) throw std::invalid_argument("lq: need Q >= 0, R > 0, G >= 0");
}

MeanFieldParams MeanFieldParams::heterogeneous(int n, double spread) {
  if (n < 1) throw std::invalid_argument("mean-field: need players");
  MeanFieldParams p;
  p.n = n;
  auto c = [n](double v) { return VectorXd::Constant(n, v); };
  p.a = spread_vec(n, 0.4, 0.2 * spread);
  p.theta = c(0.5);
  p.B = c(1.0);
  p.s = spread_vec(n, 0.3, 0.1 * spread);
  p.zeta = c(0.1);
  p.r = spread_vec(n, 1.0, 0.4 * spread);
  p.kappa = spread_vec(n, 1.0, 1.0 * spread);
  p.gamma = spread_vec(n, 0.5, 0.5 * spread);
  p.q = 1.0;
  p.G = 0.5;
  p.x0_mean = spread_vec(n, 0.2, 0.4 * spread);
  p.x0_std = c(0.3);
  return p;
}

void MeanFieldParams::check() const {
  if (n < 1) throw std::invalid_argument("mean-field: need players");
  need(a, n, "a"), need(theta, n, "theta"), need(B, n, "B"), need(s, n, "s"), need(zeta, n, "zeta");
  need(r, n, "r"), need(kappa, n, "kappa"), need(gamma, n, "gamma");
  for (int i = 0; i < n; ++i)
    if (r[i] <= 0) throw std::invalid_argument("mean-field: need r > 0");
}

CommonNoiseParams CommonNoiseParams::identical_costs(int n) {
  if (n < 1) throw std::invalid_argument("common-noise: need players");
  CommonNoiseParams p;
  p.n = n;
  auto c = [n](double v) { return VectorXd::Constant(n, v); };
  p.bb = spread_vec(n, 1.0, 0.6);
  p.sigma = spread_vec(n, 0.4, 0.2);
  p.Q = c(1.0);
  p.R = c(1.0);
  p.G = c(0.5);
  p.x0_mean = c(0.0);
  p.x0_std = c(0.3);
  return p;
}

CommonNoiseParams CommonNoiseParams::heterogeneous(int n, double spread) {
  CommonNoiseParams p = identical_costs(n);
  p.Q = spread_vec(n, 1.0, 0.8 * spread);
  p.G = spread_vec(n, 0.5, 0.4 * spread);
  p.R = spread_vec(n, 1.0, 0.4 * spread);
  return p;
}

void CommonNoiseParams::check() const {
  if (n < 1) throw std::invalid_argument("common-noise: need players");
  need(bb, n, "bb"), need(sigma, n, "sigma"), need(Q, n, "Q"), need(R, n, "R"), need(G, n, "G");
  for (int i = 0; i < n; ++i)
    if (R[i] <= 0) throw std::invalid_argument("common-noise: need R > 0");
}

TanhParams TanhParams::gentle(int n) {
  if (n < 1) throw std::invalid_argument("tanh: need players");
  TanhParams p;
  p.n = n;
  auto c = [n](double v) { return VectorXd::Constant(n, v); };
  p.kappa = spread_vec(n, 0.5, 0.2);
  p.beta = spread_vec(n, 0.4, 0.2);
  p.B = c(1.0);
  p.eta = spread_vec(n, 0.2, 0.1);
  p.vs = spread_vec(n, 0.4, 0.1);
  p.gam = c(0.15);
  p.zeta = c(0.1);
  p.D = spread_vec(n, 0.2, 0.1);
  p.omega = c(0.1);
  p.q = spread_vec(n, 1.0, 0.4);
  p.r = spread_vec(n, 0.5, 0.2);
  p.e = c(0.2);
  p.c = c(0.3);
  p.G = spread_vec(n, 1.0, 0.4);
  p.tau = c(0.3);
  p.x0_mean = spread_vec(n, 0.1, 0.4);
  p.x0_std = c(0.3);
  return p;
}

void TanhParams::check() const {
  if (n < 1) throw std::invalid_argument("tanh: need players");
  need(kappa, n, "kappa"), need(beta, n, "beta"), need(B, n, "B"), need(eta, n, "eta"), need(vs, n, "vs");
  need(gam, n, "gam"), need(zeta, n, "zeta"), need(D, n, "D"), need(omega, n, "omega"), need(q, n, "q");
  need(r, n, "r"), need(e, n, "e"), need(c, n, "c"), need(G, n, "G"), need(tau, n, "tau");
  if (!(control_bound > 0)) throw std::invalid_argument("tanh: control_bound must be positive");
  for (int i = 0; i < n; ++i)
    if (r[i] <= 0) throw std::invalid_argument("tanh: need r > 0");
}

GameWithLedger build_lq_game(const LqParams& p) {
  p.check();
  GameWithLedger g;
  GameSpec& s = g.spec;
  s.name = "lq";
  s.n_players = p.n;
  s.horizon = p.horizon;
  s.initial = make_initial(p.x0_mean, p.x0_std, p.n);
  s.drift = std::make_shared<LinearCoefficient>(p.A, p.Abar, p.B, p.b);
  s.diffusion = std::make_shared<LinearCoefficient>(p.C, p.Cbar, p.D, p.sigma);
  s.running = std::make_shared<DeviationRunning>(p.Q, p.R);
  s.terminal = std::make_shared<DeviationTerminal>(p.G);
  ConstantLedger& L = g.ledger;
  for (int i = 0; i < p.n; ++i) {
    L.L_b = std::max({L.L_b, std::abs(p.A[i]) + std::abs(p.B[i]), std::abs(p.b[i])});
    L.L_y_b = std::max(L.L_y_b, std::abs(p.Abar[i]));
    L.L_sigma = std::max({L.L_sigma, std::abs(p.C[i]) + std::abs(p.D[i]), std::abs(p.sigma[i])});
    L.L_y_sigma = std::max(L.L_y_sigma, std::abs(p.Cbar[i]));
  }
  L.refresh();
  deviation_ledger(p.Q, p.R, p.G, L);
  return g;
}

GameWithLedger build_mean_field_game(const MeanFieldParams& p) {
  p.check();
  GameWithLedger g;
  GameSpec& s = g.spec;
  s.name = "mean-field";
  s.n_players = p.n;
  s.horizon = p.horizon;
  s.initial = make_initial(p.x0_mean, p.x0_std, p.n);
  VectorXd zero = VectorXd::Zero(p.n);
  s.drift = std::make_shared<MeanTanhCoefficient>(-p.a, p.theta, p.B, zero);
  s.diffusion = std::make_shared<MeanTanhCoefficient>(zero, p.zeta, zero, p.s);
  s.running = std::make_shared<MeanFieldRunning>(p.q, p.r, p.kappa);
  s.terminal = std::make_shared<MeanFieldTerminal>(p.G, p.gamma);
  ConstantLedger& L = g.ledger;
  for (int i = 0; i < p.n; ++i) {
    L.L_b = std::max(L.L_b, std::abs(p.a[i]) + std::abs(p.B[i]));
    L.L_y_b = std::max(L.L_y_b, std::abs(p.theta[i]));
    L.L_sigma = std::max(L.L_sigma, std::abs(p.s[i]));
    L.L_y_sigma = std::max(L.L_y_sigma, std::abs(p.zeta[i]));
  }
  L.refresh();
  const int n = p.n;
  const double nn = double(n) * n;
  L.n_players = n;
  L.gaps.assign(static_cast<size_t>(n) * n, CostGapNorms{});
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CostGapNorms& gp = L.gap(i, j);
      gp.resize(n);
      if (i == j) continue;
      gp.fxx.setConstant(std::abs(p.kappa[i] - p.kappa[j]) / nn);
      gp.gxx.setConstant(std::abs(p.gamma[i] - p.gamma[j]) / nn);
      gp.fuu(i, i) = std::abs(p.r[i]);
      gp.fuu(j, j) = std::abs(p.r[j]);
    }
  return g;
}

GameWithLedger build_common_noise_game(const CommonNoiseParams& p) {
  p.check();
  GameWithLedger g;
  GameSpec& s = g.spec;
  s.name = "common-noise";
  s.n_players = p.n;
  s.horizon = p.horizon;
  s.common_noise = true;
  s.initial = make_initial(p.x0_mean, p.x0_std, p.n);
  VectorXd zero = VectorXd::Zero(p.n);
  s.drift = std::make_shared<LinearCoefficient>(zero, zero, p.bb, zero);
  s.diffusion = std::make_shared<LinearCoefficient>(zero, zero, zero, p.sigma);
  s.running = std::make_shared<DeviationRunning>(p.Q, p.R);
  s.terminal = std::make_shared<DeviationTerminal>(p.G);
  ConstantLedger& L = g.ledger;
  for (int i = 0; i < p.n; ++i) {
    L.L_b = std::max(L.L_b, std::abs(p.bb[i]));
    L.L_sigma = std::max(L.L_sigma, std::sqrt(p.sigma[i] * p.sigma[i] + 1.0));
  }
  L.L_y_b = 0.0;
  L.L_y_sigma = 0.0;
  L.refresh();
  deviation_ledger(p.Q, p.R, p.G, L);
  return g;
}

GameWithLedger build_tanh_game(const TanhParams& p) {
  p.check();
  GameWithLedger g;
  GameSpec& s = g.spec;
  s.name = "tanh-coupled";
  s.n_players = p.n;
  s.horizon = p.horizon;
  s.initial = make_initial(p.x0_mean, p.x0_std, p.n);
  s.drift = std::make_shared<TanhDrift>(p);
  s.diffusion = std::make_shared<TanhDiffusion>(p);
  s.running = std::make_shared<TanhRunning>(p);
  s.terminal = std::make_shared<TanhTerminal>(p);
  const double U = p.control_bound;
  ConstantLedger& L = g.ledger;
  for (int i = 0; i < p.n; ++i) {
    double ka = std::abs(p.kappa[i]), be = std::abs(p.beta[i]), et = std::abs(p.eta[i]), Bi = std::abs(p.B[i]);
    double first_b = ka + be + U * et + Bi + et;
    double second_b = kTanh2 * (be + U * et) + et;
    L.L_b = std::max({L.L_b, first_b, second_b, Bi});
    L.L_y_b = std::max({L.L_y_b, be + U * et, kTanh2 * (be + U * et) + et});
    double ga = std::abs(p.gam[i]), om = std::abs(p.omega[i]), Di = std::abs(p.D[i]);
    double first_s = ga + U * om + Di + om;
    double second_s = kTanh2 * (ga + U * om) + om;
    L.L_sigma = std::max({L.L_sigma, first_s, second_s, std::abs(p.vs[i]), Di});
    L.L_y_sigma = std::max(L.L_y_sigma, std::abs(p.zeta[i]));
  }
  L.refresh();
  g.box.control = U;
  g.box.state = 3.0;
  sample_gap_norms(s, g.box, L);
  return g;
}

}  // namespace ag
