#include "ag/bsde/backward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ag/util/parallel.hpp"

namespace ag {

void BsdeSolution::features(int p, int k, double* f) const {
  const int n = ens_->n_players;
  const double* x = ens_->x(p, k);
  for (int a = 0; a < n; ++a) f[a] = x[a];
  if (levels_) {
    const double* w = &(*levels_)[ens_->node(p, k) * drivers];
    for (int j = 0; j < drivers; ++j) f[n + j] = w[j];
  }
}

void BsdeSolution::y(int p, int k, double* out) const {
  if (k == grid.n_steps) {
    std::copy_n(&terminal_[static_cast<size_t>(p) * dim], dim, out);
    return;
  }
  thread_local std::vector<double> f, phi;
  f.resize(nfeat_);
  features(p, k, f.data());
  const SliceBasis& b = basis_[k];
  phi.resize(b.size());
  b.eval(f.data(), phi.data());
  const Eigen::MatrixXd& C = cy_[k];
  for (int c = 0; c < dim; ++c) {
    double s = 0.0;
    for (int r = 0; r < b.size(); ++r) s += phi[r] * C(r, c);
    out[c] = s;
  }
}

Eigen::VectorXd BsdeSolution::y(int p, int k) const {
  Eigen::VectorXd v(dim);
  y(p, k, v.data());
  return v;
}

void BsdeSolution::z(int p, int k, double* out) const {
  if (k < 0 || k >= grid.n_steps) throw std::out_of_range("z index out of range");
  thread_local std::vector<double> f, phi;
  f.resize(nfeat_);
  features(p, k, f.data());
  const SliceBasis& b = basis_[k];
  phi.resize(b.size());
  b.eval(f.data(), phi.data());
  const Eigen::MatrixXd& C = cz_[k];
  for (int c = 0; c < C.cols(); ++c) {
    double s = 0.0;
    for (int r = 0; r < b.size(); ++r) s += phi[r] * C(r, c);
    out[c] = s;
  }
}

namespace {

void symmetrize_columns(Eigen::MatrixXd& C, int side, int blocks) {
  for (int blk = 0; blk < blocks; ++blk) {
    int off = blk * side * side;
    for (int a = 0; a < side; ++a)
      for (int b = a + 1; b < side; ++b) {
        Eigen::VectorXd m = 0.5 * (C.col(off + a * side + b) + C.col(off + b * side + a));
        C.col(off + a * side + b) = m;
        C.col(off + b * side + a) = m;
      }
  }
}

}  // namespace

BsdeSolution solve_backward(const PathEnsemble& ens, const NoiseBundle& noise, const RegressionBasis& opts,
                            const BackwardProblem& prob) {
  check_compatible(ens, noise);
  if (prob.dim < 1 || !prob.terminal || !prob.driver) throw std::invalid_argument("backward problem is incomplete");
  if (prob.symmetric_side > 0 && prob.symmetric_side * prob.symmetric_side != prob.dim)
    throw std::invalid_argument("symmetric backward problem needs dim = side^2");
  const int P = ens.n_paths, M = ens.grid.n_steps, m = prob.dim, d = noise.drivers(), n = ens.n_players;
  const double dt = ens.grid.dt;

  BsdeSolution sol;
  sol.dim = m;
  sol.drivers = d;
  sol.grid = ens.grid;
  sol.n_paths = P;
  sol.ens_ = &ens;
  const bool use_levels = opts.noise_levels || !ens.shared_controls;
  sol.nfeat_ = n + (use_levels ? d : 0);
  if (use_levels) {
    if (!ens.levels.empty()) {
      sol.levels_ = std::make_shared<std::vector<double>>(ens.levels);
    } else {
      auto lv = std::make_shared<std::vector<double>>(static_cast<size_t>(P) * (M + 1) * d, 0.0);
      for_blocks(P, [&](int, int b, int e) {
        for (int p = b; p < e; ++p)
          for (int k = 0; k < M; ++k)
            for (int j = 0; j < d; ++j)
              (*lv)[ens.node(p, k + 1) * d + j] = (*lv)[ens.node(p, k) * d + j] + noise.dW(p, k, j);
      });
      sol.levels_ = lv;
    }
  }
  sol.basis_.resize(M);
  sol.cy_.resize(M);
  sol.cz_.resize(M);
  sol.diag_.resize(M);
  sol.terminal_.resize(static_cast<size_t>(P) * m);

  Eigen::MatrixXd Ynext(P, m);
  for_blocks(P, [&](int, int b, int e) {
    std::vector<double> xi(m);
    for (int p = b; p < e; ++p) {
      prob.terminal(p, xi.data());
      for (int c = 0; c < m; ++c) {
        if (!std::isfinite(xi[c])) throw std::runtime_error("non-finite terminal value on path " + std::to_string(p));
        Ynext(p, c) = xi[c];
        sol.terminal_[static_cast<size_t>(p) * m + c] = xi[c];
      }
    }
  });

  Eigen::MatrixXd feats(P, sol.nfeat_);
  Eigen::MatrixXd Tz(P, d * m), Ty(P, m);
  for (int k = M - 1; k >= 0; --k) {
    for_blocks(P, [&](int, int b, int e) {
      for (int p = b; p < e; ++p) {
        const double* x = ens.x(p, k);
        for (int a = 0; a < n; ++a) feats(p, a) = x[a];
        if (use_levels)
          for (int j = 0; j < d; ++j) feats(p, n + j) = (*sol.levels_)[ens.node(p, k) * d + j];
      }
    });
    SliceBasis& basis = sol.basis_[k];
    basis.fit(feats, opts.degree);
    Eigen::MatrixXd Phi = basis.design(feats);
    SliceRegression reg(Phi, opts, k);

    // z from the martingale part of y_{k+1}: subtracting an F_k-measurable
    // projection leaves the conditional expectation unchanged.
    Eigen::MatrixXd proj = Phi * reg.coefficients(Ynext);
    for_blocks(P, [&](int, int b, int e) {
      for (int p = b; p < e; ++p) {
        const double* dW = noise.dW(p, k);
        for (int j = 0; j < d; ++j)
          for (int c = 0; c < m; ++c) Tz(p, j * m + c) = (Ynext(p, c) - proj(p, c)) * dW[j] / dt;
      }
    });
    Eigen::MatrixXd cz = reg.coefficients(Tz);
    if (prob.symmetric_side > 0) symmetrize_columns(cz, prob.symmetric_side, d);
    Eigen::MatrixXd zhat = Phi * cz;

    for_blocks(P, [&](int, int b, int e) {
      std::vector<double> out(m), yn(m), zz(d * m);
      for (int p = b; p < e; ++p) {
        for (int c = 0; c < m; ++c) yn[c] = Ynext(p, c);
        for (int c = 0; c < d * m; ++c) zz[c] = zhat(p, c);
        prob.driver(p, k, yn.data(), zz.data(), out.data());
        for (int c = 0; c < m; ++c) Ty(p, c) = yn[c] + out[c] * dt;
      }
    });
    Eigen::MatrixXd cy = reg.coefficients(Ty);
    if (prob.symmetric_side > 0) symmetrize_columns(cy, prob.symmetric_side, 1);
    Eigen::MatrixXd yk = Phi * cy;
    if (!yk.allFinite()) throw std::runtime_error("non-finite backward value at step " + std::to_string(k));

    StepDiagnostics& dg = sol.diag_[k];
    dg.basis_size = basis.size();
    dg.ridge = reg.ridge();
    dg.cond = reg.cond();
    dg.residual_rms = std::sqrt((Ty - yk).squaredNorm() / (static_cast<double>(P) * m));
    sol.cy_[k] = std::move(cy);
    sol.cz_[k] = std::move(cz);
    Ynext = std::move(yk);
  }
  return sol;
}

BsdeSolution solve_linear_bsde(const LinearBsdeSpec& spec, const PathEnsemble& ens, const NoiseBundle& noise,
                               const RegressionBasis& opts) {
  if (!spec.terminal) throw std::invalid_argument("linear BSDE needs a terminal condition");
  const int m = spec.dim, d = noise.drivers();
  BackwardProblem prob;
  prob.dim = m;
  prob.terminal = spec.terminal;
  prob.driver = [&spec, m, d](int p, int k, const double* yn, const double* z, double* out) {
    thread_local Eigen::MatrixXd A, B;
    thread_local std::vector<double> f;
    std::fill(out, out + m, 0.0);
    if (spec.A) {
      A.setZero(m, m);
      spec.A(p, k, A);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) out[r] += A(r, c) * yn[c];
    }
    if (spec.B) {
      for (int j = 0; j < d; ++j) {
        B.setZero(m, m);
        spec.B(p, k, j, B);
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c) out[r] += B(r, c) * z[j * m + c];
      }
    }
    if (spec.forcing) {
      f.assign(m, 0.0);
      spec.forcing(p, k, f.data());
      for (int r = 0; r < m; ++r) out[r] += f[r];
    }
  };
  return solve_backward(ens, noise, opts, prob);
}

double apriori_constant(double C1, int d, double T) {
  double a = 2.0 * C1 + 2.0 * C1 * C1 * d;
  double E = std::exp(a * std::max(1.0, T));
  double C3 = T * a * E + 1.0;
  double K = C3 + E;
  double Mc = C1 * C1 * (d + 1) + 1.0;
  double eps = 1.0 / (2.0 * Mc * K);
  double xi_y = 8.0 * (Mc * K + 1.0);
  double F_y = 8.0 * (2.0 * Mc * Mc * K * K + 1.0);
  double xi_z = K * (1.0 + 8.0 * eps * (Mc * K + 1.0));
  double F_z = K * (8.0 * eps * (2.0 * Mc * Mc * K * K + 1.0) + 1.0 / eps);
  return std::max(xi_y + xi_z, F_y + F_z);
}

AprioriCheck apriori_bound_check(const LinearBsdeSpec& spec, const BsdeSolution& sol, const PathEnsemble& ens) {
  const int P = sol.n_paths, M = sol.grid.n_steps, m = sol.dim, d = sol.drivers;
  const double dt = sol.grid.dt;
  AprioriCheck out;
  std::vector<double> lhs(P), rhs(P), c1(P, 0.0);
  (void)ens;
  for_blocks(P, [&](int, int b, int e) {
    Eigen::MatrixXd A(m, m), B(m, m);
    std::vector<double> y(m), z(d * m), f(m), xi(m);
    for (int p = b; p < e; ++p) {
      double ymax = 0.0, zint = 0.0, F = 0.0;
      for (int k = 0; k <= M; ++k) {
        sol.y(p, k, y.data());
        double s = 0.0;
        for (double v : y) s += v * v;
        ymax = std::max(ymax, s);
        if (k == M) break;
        sol.z(p, k, z.data());
        for (double v : z) zint += v * v * dt;
        if (spec.forcing) {
          std::fill(f.begin(), f.end(), 0.0);
          spec.forcing(p, k, f.data());
          double fn = 0.0;
          for (double v : f) fn += v * v;
          F += std::sqrt(fn) * dt;
        }
        if (spec.A) {
          A.setZero();
          spec.A(p, k, A);
          c1[p] = std::max(c1[p], A.norm());
        }
        if (spec.B)
          for (int j = 0; j < d; ++j) {
            B.setZero();
            spec.B(p, k, j, B);
            c1[p] = std::max(c1[p], B.norm());
          }
      }
      spec.terminal(p, xi.data());
      double xs = 0.0;
      for (double v : xi) xs += v * v;
      lhs[p] = ymax + zint;
      rhs[p] = xs + F * F;
    }
  });
  double C1 = 0.0, L = 0.0, R = 0.0;
  for (int p = 0; p < P; ++p) {
    C1 = std::max(C1, c1[p]);
    L += lhs[p];
    R += rhs[p];
  }
  out.C1 = C1;
  out.constant = apriori_constant(C1, d, sol.grid.horizon);
  out.lhs = L / P;
  out.rhs = out.constant * R / P;
  out.ratio = out.rhs > 0 ? out.lhs / out.rhs : (out.lhs > 0 ? INFINITY : 0.0);
  return out;
}

}  // namespace ag
