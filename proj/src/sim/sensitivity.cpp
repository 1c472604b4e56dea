#include "ag/sim/sensitivity.hpp"

#include <stdexcept>

#include "ag/util/parallel.hpp"

namespace ag {

double direction_value(const ControlProfile& dir, int h, const PathEnsemble& ens, int p, int k) {
  return dir.value(h, ens.grid.t(k), ens.w(p, k));
}

void sensitivity_step(const NodePartials& np, int n, int h, double du, const double* dW, double dt, double* Y) {
  // Y_a <- Y_a + (B0 Y + B1u u')_a dt + (Pi0[a] Y + Pi1u u')_a dW_a, all from the old Y
  thread_local std::vector<double> Yn;
  Yn.resize(n);
  for (int a = 0; a < n; ++a) {
    const CoefPartials& b = np.b[a];
    const CoefPartials& s = np.s[a];
    double db = b.dx * Y[a], ds = s.dx * Y[a];
    for (int c = 0; c < n; ++c) {
      db += b.dy[c] * Y[c];
      ds += s.dy[c] * Y[c];
    }
    if (a == h) {
      db += b.du * du;
      ds += s.du * du;
    }
    Yn[a] = Y[a] + db * dt + ds * dW[a];
  }
  for (int a = 0; a < n; ++a) Y[a] = Yn[a];
}

double second_source(const CoefPartials& d, int a, int n, const double* Yh, const double* Yl, int h, int l,
                     double du_h, double du_l) {
  double q = d.dxx * Yh[a] * Yl[a];
  double xyh = 0.0, xyl = 0.0, uyh = 0.0, uyl = 0.0, yy = 0.0;
  for (int c = 0; c < n; ++c) {
    xyh += d.dxy[c] * Yh[c];
    xyl += d.dxy[c] * Yl[c];
    uyh += d.duy[c] * Yh[c];
    uyl += d.duy[c] * Yl[c];
    double row = 0.0;
    for (int e = 0; e < n; ++e) row += d.dyy(c, e) * Yl[e];
    yy += Yh[c] * row;
  }
  q += Yh[a] * xyl + Yl[a] * xyh + yy;
  if (a == h) q += du_h * (d.dxu * Yl[a] + uyl);
  if (a == l) q += du_l * (d.dxu * Yh[a] + uyh);
  if (a == h && a == l) q += d.duu * du_h * du_l;
  return q;
}

void second_sensitivity_step(const NodePartials& np, int n, int h, int l, double du_h, double du_l,
                             const double* Yh, const double* Yl, const double* dW, double dt, double* Z) {
  thread_local std::vector<double> Zn;
  Zn.resize(n);
  for (int a = 0; a < n; ++a) {
    const CoefPartials& b = np.b[a];
    const CoefPartials& s = np.s[a];
    double db = b.dx * Z[a], ds = s.dx * Z[a];
    for (int c = 0; c < n; ++c) {
      db += b.dy[c] * Z[c];
      ds += s.dy[c] * Z[c];
    }
    db += second_source(b, a, n, Yh, Yl, h, l, du_h, du_l);
    ds += second_source(s, a, n, Yh, Yl, h, l, du_h, du_l);
    Zn[a] = Z[a] + db * dt + ds * dW[a];
  }
  for (int a = 0; a < n; ++a) Z[a] = Zn[a];
}

SensitivityEnsemble propagate_sensitivity(const GameSpec& spec, const PathEnsemble& ens, int h,
                                          const ControlProfile& direction, const NoiseBundle& noise) {
  check_compatible(ens, noise);
  const int n = spec.n_players, M = ens.grid.n_steps;
  if (h < 0 || h >= n) throw std::invalid_argument("propagate_sensitivity: player out of range");
  SensitivityEnsemble out;
  out.h = h;
  out.direction = direction;
  out.grid = ens.grid;
  out.n_paths = ens.n_paths;
  out.n_players = n;
  out.values.assign(static_cast<size_t>(ens.n_paths) * (M + 1) * n, 0.0);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    NodePartials np(n);
    std::vector<double> Y(n);
    for (int p = b; p < e; ++p) {
      std::fill(Y.begin(), Y.end(), 0.0);
      for (int k = 0; k < M; ++k) {
        np.eval(spec, ens.grid.t(k), ens.x(p, k), ens.u(p, k), Order::first);
        sensitivity_step(np, n, h, direction_value(direction, h, ens, p, k), noise.dW(p, k), ens.grid.dt, Y.data());
        std::copy(Y.begin(), Y.end(), out.values.begin() + (static_cast<size_t>(p) * (M + 1) + k + 1) * n);
      }
    }
  });
  return out;
}

SecondSensitivityEnsemble propagate_second_sensitivity(const GameSpec& spec, const PathEnsemble& ens,
                                                       const SensitivityEnsemble& Yh,
                                                       const SensitivityEnsemble& Yl, const NoiseBundle& noise) {
  check_compatible(ens, noise);
  if (Yh.h == Yl.h) throw std::invalid_argument("second sensitivity needs two different players");
  if (Yh.n_paths != ens.n_paths || Yl.n_paths != ens.n_paths) throw std::invalid_argument("sensitivity ensembles do not match paths");
  const int n = spec.n_players, M = ens.grid.n_steps;
  SecondSensitivityEnsemble out;
  out.h = Yh.h;
  out.l = Yl.h;
  out.grid = ens.grid;
  out.n_paths = ens.n_paths;
  out.n_players = n;
  out.values.assign(static_cast<size_t>(ens.n_paths) * (M + 1) * n, 0.0);
  for_blocks(ens.n_paths, [&](int, int b, int e) {
    NodePartials np(n);
    std::vector<double> Z(n);
    for (int p = b; p < e; ++p) {
      std::fill(Z.begin(), Z.end(), 0.0);
      for (int k = 0; k < M; ++k) {
        np.eval(spec, ens.grid.t(k), ens.x(p, k), ens.u(p, k), Order::second);
        double duh = direction_value(Yh.direction, Yh.h, ens, p, k);
        double dul = direction_value(Yl.direction, Yl.h, ens, p, k);
        second_sensitivity_step(np, n, Yh.h, Yl.h, duh, dul, Yh.y(p, k), Yl.y(p, k), noise.dW(p, k), ens.grid.dt, Z.data());
        std::copy(Z.begin(), Z.end(), out.values.begin() + (static_cast<size_t>(p) * (M + 1) + k + 1) * n);
      }
    }
  });
  return out;
}

}  // namespace ag
