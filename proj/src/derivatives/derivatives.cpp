#include "ag/derivatives/derivatives.hpp"

#include <cmath>
#include <stdexcept>

#include "ag/util/parallel.hpp"

namespace ag {

std::string method_name(Method m) {
  switch (m) {
    case Method::fd: return "FD";
    case Method::sens: return "SENS";
    case Method::bsde: return "BSDE";
    case Method::z_oracle: return "Z-ORACLE";
  }
  return "?";
}

Method method_from_name(const std::string& s) {
  for (Method m : {Method::fd, Method::sens, Method::bsde, Method::z_oracle})
    if (method_name(m) == s) return m;
  throw std::invalid_argument("unknown derivative method '" + s + "'");
}

DerivativeEstimate make_estimate(const std::vector<double>& pathwise, Method m, int i, int h, int l) {
  Estimate e = mean_se(pathwise);
  DerivativeEstimate d;
  d.value = e.value;
  d.std_error = e.se;
  d.method = m;
  d.i = i;
  d.h = h;
  d.l = l;
  return d;
}

namespace {

void costs_from_path(const GameSpec& spec, const TimeGrid& g, const double* x, const double* u, double* out) {
  const int n = spec.n_players, M = g.n_steps;
  thread_local std::vector<double> f;
  f.resize(n);
  for (int i = 0; i < n; ++i) out[i] = 0.0;
  for (int k = 0; k < M; ++k) {
    spec.running->values(n, g.t(k), x + static_cast<size_t>(k) * n, u + static_cast<size_t>(k) * n, f.data());
    for (int i = 0; i < n; ++i) out[i] += f[i] * g.dt;
  }
  spec.terminal->values(n, x + static_cast<size_t>(M) * n, f.data());
  for (int i = 0; i < n; ++i) out[i] += f[i];
}

}  // namespace

Eigen::MatrixXd pathwise_costs(const GameSpec& spec, const PathEnsemble& ens) {
  const int n = spec.n_players;
  Eigen::MatrixXd C(ens.n_paths, n);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    std::vector<double> c(n);
    for (int p = b; p < e; ++p) {
      costs_from_path(spec, ens.grid, ens.x(p, 0), ens.u(p, 0), c.data());
      for (int i = 0; i < n; ++i) C(p, i) = c[i];
    }
  });
  return C;
}

Eigen::MatrixXd simulate_costs(const GameSpec& spec, const ControlProfile& ctrl, const NoiseBundle& noise) {
  const int n = spec.n_players, M = noise.grid().n_steps;
  if (noise.drivers() != spec.drivers()) throw std::invalid_argument("simulate_costs: noise has wrong driver count");
  std::vector<double> table = ctrl.table(noise.grid());
  Eigen::MatrixXd C(noise.paths(), n);
  for_blocks(noise.paths(), [&](int, int b, int e) {
    std::vector<double> x(static_cast<size_t>(M + 1) * n), u(x.size()), c(n);
    for (int p = b; p < e; ++p) {
      simulate_path(spec, ctrl, table, noise, p, x.data(), u.data(), nullptr);
      costs_from_path(spec, noise.grid(), x.data(), u.data(), c.data());
      for (int i = 0; i < n; ++i) C(p, i) = c[i];
    }
  });
  return C;
}

std::vector<Estimate> cost_value(const GameSpec& spec, const PathEnsemble& ens) {
  Eigen::MatrixXd C = pathwise_costs(spec, ens);
  std::vector<Estimate> out;
  for (int i = 0; i < spec.n_players; ++i) {
    std::vector<double> v(C.col(i).data(), C.col(i).data() + C.rows());
    out.push_back(mean_se(v));
  }
  return out;
}

std::vector<double> richardson_weights(const std::vector<double>& eps) {
  const int m = static_cast<int>(eps.size());
  if (m < 1 || m > 3) throw std::invalid_argument("finite-difference schedule needs 1 to 3 step sizes");
  for (double e : eps)
    if (!(e > 0)) throw std::invalid_argument("finite-difference steps must be positive");
  Eigen::MatrixXd V(m, m);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
  rhs[0] = 1.0;
  for (int r = 0; r < m; ++r)
    for (int c = 0; c < m; ++c) V(r, c) = std::pow(eps[c], 2.0 * r);
  Eigen::VectorXd w = V.fullPivLu().solve(rhs);
  return std::vector<double>(w.data(), w.data() + m);
}

Eigen::MatrixXd first_fd_pathwise(const GameSpec& spec, const ControlProfile& ctrl, int h, const ControlProfile& dir,
                                  const NoiseBundle& noise, const FdOptions& opts) {
  if (h < 0 || h >= spec.n_players) throw std::invalid_argument("first_fd: player out of range");
  // only player h's component of the direction moves
  ControlProfile dh(spec.n_players, spec.horizon);
  for (int s = 0; s < kShapes; ++s) dh.coef(h, static_cast<Shape>(s)) = dir.coef(h, static_cast<Shape>(s));
  for (int j = 0; j < dir.drivers(); ++j) dh.set_loading(h, j, dir.loading(h, j));

  std::vector<double> w = richardson_weights(opts.eps);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(noise.paths(), spec.n_players);
  for (size_t q = 0; q < opts.eps.size(); ++q) {
    double e = opts.eps[q];
    Eigen::MatrixXd cp = simulate_costs(spec, ctrl + dh * e, noise);
    Eigen::MatrixXd cm = simulate_costs(spec, ctrl + dh * (-e), noise);
    out += w[q] * (cp - cm) / (2.0 * e);
  }
  return out;
}

DerivativeEstimate first_derivative_fd(const GameSpec& spec, const ControlProfile& ctrl, int i, int h,
                                       const ControlProfile& dir, const NoiseBundle& noise, const FdOptions& opts) {
  Eigen::MatrixXd D = first_fd_pathwise(spec, ctrl, h, dir, noise, opts);
  std::vector<double> v(D.col(i).data(), D.col(i).data() + D.rows());
  DerivativeEstimate r = make_estimate(v, Method::fd, i, h);
  r.eps = opts.eps;
  return r;
}

std::vector<double> first_sens_pathwise(const GameSpec& spec, const PathEnsemble& ens, const SensitivityEnsemble& Y, int i) {
  const int n = spec.n_players, M = ens.grid.n_steps, h = Y.h;
  std::vector<double> out(ens.n_paths);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    CostPartials c(n);
    for (int p = b; p < e; ++p) {
      double acc = 0.0;
      for (int k = 0; k < M; ++k) {
        c.clear();
        spec.running->eval(i, ens.grid.t(k), ens.x(p, k), ens.u(p, k), Order::first, c);
        const double* y = Y.y(p, k);
        double s = c.du[h] * direction_value(Y.direction, h, ens, p, k);
        for (int a = 0; a < n; ++a) s += c.dy[a] * y[a];
        acc += s * ens.grid.dt;
      }
      c.clear();
      spec.terminal->eval(i, ens.x(p, M), Order::first, c);
      const double* y = Y.y(p, M);
      for (int a = 0; a < n; ++a) acc += c.dy[a] * y[a];
      out[p] = acc;
    }
  });
  return out;
}

DerivativeEstimate first_derivative_sens(const GameSpec& spec, const PathEnsemble& ens, const SensitivityEnsemble& Y, int i) {
  return make_estimate(first_sens_pathwise(spec, ens, Y, i), Method::sens, i, Y.h);
}

Eigen::MatrixXd first_sens_streaming(const GameSpec& spec, const PathEnsemble& ens, int h, const ControlProfile& dir,
                                     const NoiseBundle& noise) {
  return first_sens_streaming(spec, ens, h, std::vector<ControlProfile>{dir}, noise)[0];
}

std::vector<Eigen::MatrixXd> first_sens_streaming(const GameSpec& spec, const PathEnsemble& ens, int h,
                                                  const std::vector<ControlProfile>& dirs, const NoiseBundle& noise) {
  check_compatible(ens, noise);
  const int n = spec.n_players, M = ens.grid.n_steps, nd = static_cast<int>(dirs.size());
  std::vector<Eigen::MatrixXd> out(nd, Eigen::MatrixXd(ens.n_paths, n));
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    NodePartials np(n);
    std::vector<CostPartials> c(n, CostPartials(n));
    CostPartials ct(n);
    std::vector<double> Y(static_cast<size_t>(nd) * n), acc(static_cast<size_t>(nd) * n), du(nd);
    for (int p = b; p < e; ++p) {
      std::fill(Y.begin(), Y.end(), 0.0);
      std::fill(acc.begin(), acc.end(), 0.0);
      for (int k = 0; k < M; ++k) {
        double t = ens.grid.t(k);
        for (int q = 0; q < nd; ++q) du[q] = direction_value(dirs[q], h, ens, p, k);
        for (int i = 0; i < n; ++i) {
          c[i].clear();
          spec.running->eval(i, t, ens.x(p, k), ens.u(p, k), Order::first, c[i]);
        }
        for (int q = 0; q < nd; ++q) {
          const double* y = &Y[static_cast<size_t>(q) * n];
          for (int i = 0; i < n; ++i) {
            double s = c[i].du[h] * du[q];
            for (int a = 0; a < n; ++a) s += c[i].dy[a] * y[a];
            acc[static_cast<size_t>(q) * n + i] += s * ens.grid.dt;
          }
        }
        np.eval(spec, t, ens.x(p, k), ens.u(p, k), Order::first);
        for (int q = 0; q < nd; ++q)
          sensitivity_step(np, n, h, du[q], noise.dW(p, k), ens.grid.dt, &Y[static_cast<size_t>(q) * n]);
      }
      for (int i = 0; i < n; ++i) {
        ct.clear();
        spec.terminal->eval(i, ens.x(p, M), Order::first, ct);
        for (int q = 0; q < nd; ++q) {
          const double* y = &Y[static_cast<size_t>(q) * n];
          double s = 0.0;
          for (int a = 0; a < n; ++a) s += ct.dy[a] * y[a];
          out[q](p, i) = acc[static_cast<size_t>(q) * n + i] + s;
        }
      }
    }
  });
  return out;
}

BsdeGradient first_bsde_gradient(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& adj) {
  const int n = spec.n_players, M = ens.grid.n_steps, i = adj.player, d = spec.drivers();
  BsdeGradient G;
  G.player = i;
  G.n_paths = ens.n_paths;
  G.n_players = n;
  G.grid = ens.grid;
  G.g.resize(static_cast<size_t>(ens.n_paths) * M * n);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    NodePartials np(n);
    CostPartials c(n);
    std::vector<double> P(n), Q(static_cast<size_t>(d) * n);
    for (int p = b; p < e; ++p) {
      for (int k = 0; k < M; ++k) {
        double t = ens.grid.t(k);
        const double* x = ens.x(p, k);
        const double* u = ens.u(p, k);
        np.eval(spec, t, x, u, Order::first);
        c.clear();
        spec.running->eval(i, t, x, u, Order::first, c);
        adj.sol.y(p, k + 1, P.data());
        adj.sol.z(p, k, Q.data());
        double* out = &G.g[(static_cast<size_t>(p) * M + k) * n];
        for (int h = 0; h < n; ++h)
          out[h] = P[h] * np.b[h].du + np.s[h].du * Q[static_cast<size_t>(h) * n + h] + c.du[h];
      }
    }
  });
  return G;
}

std::vector<double> first_bsde_pathwise(const BsdeGradient& G, const PathEnsemble& ens, int h, const ControlProfile& dir) {
  const int M = ens.grid.n_steps;
  std::vector<double> out(ens.n_paths);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    for (int p = b; p < e; ++p) {
      double acc = 0.0;
      for (int k = 0; k < M; ++k) acc += G.at(p, k, h) * direction_value(dir, h, ens, p, k) * ens.grid.dt;
      out[p] = acc;
    }
  });
  return out;
}

std::vector<double> first_bsde_pathwise(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& adj,
                                        int h, const ControlProfile& dir) {
  const int n = spec.n_players, M = ens.grid.n_steps, i = adj.player, d = spec.drivers();
  std::vector<double> out(ens.n_paths);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    CoefPartials pb(n), ps(n);
    CostPartials c(n);
    std::vector<double> P(n), Q(static_cast<size_t>(d) * n);
    for (int p = b; p < e; ++p) {
      double acc = 0.0;
      for (int k = 0; k < M; ++k) {
        double du = direction_value(dir, h, ens, p, k);
        if (du == 0.0) continue;
        double t = ens.grid.t(k);
        const double* x = ens.x(p, k);
        const double* u = ens.u(p, k);
        spec.drift->eval(h, t, x[h], x, u[h], Order::first, pb);
        spec.diffusion->eval(h, t, x[h], x, u[h], Order::first, ps);
        c.clear();
        spec.running->eval(i, t, x, u, Order::first, c);
        adj.sol.y(p, k + 1, P.data());
        adj.sol.z(p, k, Q.data());
        double g = P[h] * pb.du + ps.du * Q[static_cast<size_t>(h) * n + h] + c.du[h];
        acc += g * du * ens.grid.dt;
      }
      out[p] = acc;
    }
  });
  return out;
}

DerivativeEstimate first_derivative_bsde(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& adj,
                                         int h, const ControlProfile& dir) {
  return make_estimate(first_bsde_pathwise(spec, ens, adj, h, dir), Method::bsde, adj.player, h);
}

Eigen::MatrixXd second_fd_pathwise(const GameSpec& spec, const ControlProfile& ctrl, int h, const ControlProfile& dir_h,
                                   int l, const ControlProfile& dir_l, const NoiseBundle& noise, const FdOptions& opts) {
  if (h == l) throw std::invalid_argument("second_fd: players must differ");
  const int n = spec.n_players;
  auto only = [&](const ControlProfile& d, int a) {
    ControlProfile r(n, spec.horizon);
    for (int s = 0; s < kShapes; ++s) r.coef(a, static_cast<Shape>(s)) = d.coef(a, static_cast<Shape>(s));
    for (int j = 0; j < d.drivers(); ++j) r.set_loading(a, j, d.loading(a, j));
    return r;
  };
  ControlProfile dh = only(dir_h, h), dl = only(dir_l, l);
  std::vector<double> w = richardson_weights(opts.eps);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(noise.paths(), n);
  for (size_t q = 0; q < opts.eps.size(); ++q) {
    double e = opts.eps[q];
    Eigen::MatrixXd pp = simulate_costs(spec, ctrl + dh * e + dl * e, noise);
    Eigen::MatrixXd pm = simulate_costs(spec, ctrl + dh * e + dl * (-e), noise);
    Eigen::MatrixXd mp = simulate_costs(spec, ctrl + dh * (-e) + dl * e, noise);
    Eigen::MatrixXd mm = simulate_costs(spec, ctrl + dh * (-e) + dl * (-e), noise);
    out += w[q] * (pp - pm - mp + mm) / (4.0 * e * e);
  }
  return out;
}

DerivativeEstimate second_derivative_fd(const GameSpec& spec, const ControlProfile& ctrl, int i, int h,
                                        const ControlProfile& dir_h, int l, const ControlProfile& dir_l,
                                        const NoiseBundle& noise, const FdOptions& opts) {
  Eigen::MatrixXd D = second_fd_pathwise(spec, ctrl, h, dir_h, l, dir_l, noise, opts);
  std::vector<double> v(D.col(i).data(), D.col(i).data() + D.rows());
  DerivativeEstimate r = make_estimate(v, Method::fd, i, h, l);
  r.eps = opts.eps;
  return r;
}

std::vector<double> second_z_pathwise(const GameSpec& spec, const PathEnsemble& ens, const SensitivityEnsemble& Yh,
                                      const SensitivityEnsemble& Yl, const SecondSensitivityEnsemble& Z, int i) {
  const int n = spec.n_players, M = ens.grid.n_steps, h = Yh.h, l = Yl.h;
  std::vector<double> out(ens.n_paths);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    CostPartials c(n);
    for (int p = b; p < e; ++p) {
      double acc = 0.0;
      for (int k = 0; k <= M; ++k) {
        const double* yh = Yh.y(p, k);
        const double* yl = Yl.y(p, k);
        const double* z = Z.z(p, k);
        c.clear();
        double s = 0.0;
        if (k < M) {
          spec.running->eval(i, ens.grid.t(k), ens.x(p, k), ens.u(p, k), Order::second, c);
          double duh = direction_value(Yh.direction, h, ens, p, k);
          double dul = direction_value(Yl.direction, l, ens, p, k);
          s += c.duu(h, l) * duh * dul;
          for (int a = 0; a < n; ++a) {
            s += duh * c.dyu(a, h) * yl[a] + dul * c.dyu(a, l) * yh[a];
          }
        } else {
          spec.terminal->eval(i, ens.x(p, M), Order::second, c);
        }
        for (int a = 0; a < n; ++a) {
          s += c.dy[a] * z[a];
          for (int q = 0; q < n; ++q) s += yh[a] * c.dyy(a, q) * yl[q];
        }
        acc += k < M ? s * ens.grid.dt : s;
      }
      out[p] = acc;
    }
  });
  return out;
}

DerivativeEstimate second_derivative_z_oracle(const GameSpec& spec, const PathEnsemble& ens,
                                              const SensitivityEnsemble& Yh, const SensitivityEnsemble& Yl,
                                              const SecondSensitivityEnsemble& Z, int i) {
  return make_estimate(second_z_pathwise(spec, ens, Yh, Yl, Z, i), Method::z_oracle, i, Yh.h, Yl.h);
}

namespace {

// Source of the second variation without the pure y-Hessian part, which the
// second adjoint carries.
double source_without_yy(const CoefPartials& d, int a, int n, const double* Yh, const double* Yl, int h, int l,
                         double duh, double dul) {
  double full = second_source(d, a, n, Yh, Yl, h, l, duh, dul);
  double yy = 0.0;
  for (int c = 0; c < n; ++c) {
    double row = 0.0;
    for (int e = 0; e < n; ++e) row += d.dyy(c, e) * Yl[e];
    yy += Yh[c] * row;
  }
  return full - yy;
}

}  // namespace

std::vector<double> second_bsde_pathwise(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& first,
                                         const SecondAdjointSolution& second, const SensitivityEnsemble& Yh,
                                         const SensitivityEnsemble& Yl) {
  if (first.player != second.player) throw std::invalid_argument("second_bsde: adjoints of different players");
  const int n = spec.n_players, M = ens.grid.n_steps, h = Yh.h, l = Yl.h, i = first.player, d = spec.drivers();
  if (h == l) throw std::invalid_argument("second_bsde: players must differ");
  std::vector<double> out(ens.n_paths);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    NodePartials np(n);
    CostPartials c(n);
    std::vector<double> P(n), Q(static_cast<size_t>(d) * n), PP(static_cast<size_t>(n) * n),
        QQ(static_cast<size_t>(d) * n * n);
    for (int p = b; p < e; ++p) {
      double acc = 0.0;
      for (int k = 0; k < M; ++k) {
        double t = ens.grid.t(k);
        const double* x = ens.x(p, k);
        const double* u = ens.u(p, k);
        const double* yh = Yh.y(p, k);
        const double* yl = Yl.y(p, k);
        double duh = direction_value(Yh.direction, h, ens, p, k);
        double dul = direction_value(Yl.direction, l, ens, p, k);
        np.eval(spec, t, x, u, Order::second);
        c.clear();
        spec.running->eval(i, t, x, u, Order::second, c);
        first.sol.y(p, k + 1, P.data());
        first.sol.z(p, k, Q.data());
        second.sol.y(p, k + 1, PP.data());
        second.sol.z(p, k, QQ.data());
        auto Pm = [&](int a, int q) { return PP[static_cast<size_t>(a) * n + q]; };
        auto Qm = [&](int j, int a, int q) { return QQ[(static_cast<size_t>(j) * n + a) * n + q]; };

        double s = c.duu(h, l) * duh * dul;
        // player h moves along duh, player l along dul
        auto side = [&](int a, double du, const double* yo) {
          const CoefPartials& bb = np.b[a];
          const CoefPartials& ss = np.s[a];
          double Py = 0.0, Qy = 0.0, fy = 0.0, pi = ss.dx * yo[a];
          for (int q = 0; q < n; ++q) {
            Py += Pm(a, q) * yo[q];
            Qy += Qm(a, a, q) * yo[q];
            fy += c.dyu(q, a) * yo[q];
            pi += ss.dy[q] * yo[q];
          }
          return du * (bb.du * Py + ss.du * Pm(a, a) * pi + ss.du * Qy + fy);
        };
        s += side(h, duh, yl) + side(l, dul, yh);
        for (int a = 0; a < n; ++a) {
          s += P[a] * source_without_yy(np.b[a], a, n, yh, yl, h, l, duh, dul);
          s += Q[static_cast<size_t>(a) * n + a] * source_without_yy(np.s[a], a, n, yh, yl, h, l, duh, dul);
        }
        acc += s * ens.grid.dt;
      }
      out[p] = acc;
    }
  });
  return out;
}

DerivativeEstimate second_derivative_bsde(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& first,
                                          const SecondAdjointSolution& second, const SensitivityEnsemble& Yh,
                                          const SensitivityEnsemble& Yl) {
  return make_estimate(second_bsde_pathwise(spec, ens, first, second, Yh, Yl), Method::bsde, first.player, Yh.h, Yl.h);
}

}  // namespace ag
