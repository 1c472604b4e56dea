#include "ag/alpha/asymmetry.hpp"

#include <cmath>
#include <stdexcept>

#include "ag/bsde/adjoint.hpp"
#include "ag/sim/paths.hpp"
#include "ag/sim/sensitivity.hpp"
#include "ag/util/parallel.hpp"

namespace ag {

void AsymmetryMatrix::resize(int n) {
  n_players = n;
  value = Eigen::MatrixXd::Zero(n, n);
  se = Eigen::MatrixXd::Zero(n, n);
  normalized = Eigen::MatrixXd::Zero(n, n);
  normalized_se = Eigen::MatrixXd::Zero(n, n);
  pairs.clear();
}

void AsymmetryMatrix::set(const PairAsymmetry& pa) {
  value(pa.i, pa.j) = value(pa.j, pa.i) = pa.value;
  se(pa.i, pa.j) = se(pa.j, pa.i) = pa.se;
  normalized(pa.i, pa.j) = normalized(pa.j, pa.i) = pa.normalized;
  normalized_se(pa.i, pa.j) = normalized_se(pa.j, pa.i) = pa.normalized_se;
  pairs.push_back(pa);
}

Estimate AsymmetryMatrix::alpha(int* argmax) const {
  Estimate best;
  int arg = 0;
  for (int i = 0; i < n_players; ++i) {
    double s = 0.0, v = 0.0;
    for (int j = 0; j < n_players; ++j) {
      if (j == i) continue;
      s += value(i, j);
      v += se(i, j) * se(i, j);
    }
    if (i == 0 || 2.0 * s > best.value) {
      best.value = 2.0 * s;
      best.se = 2.0 * std::sqrt(v);
      arg = i;
    }
  }
  if (argmax) *argmax = arg;
  return best;
}

double direction_norm(Shape s, const TimeGrid& grid) {
  double acc = 0.0;
  for (int k = 0; k < grid.n_steps; ++k) {
    double v = shape_value(s, grid.t(k), grid.horizon);
    acc += v * v * grid.dt;
  }
  return std::sqrt(acc);
}

namespace {

// Keeps the largest |mean| over direction pairs, raw and normalized.
struct PairMax {
  PairAsymmetry out;
  bool any = false;
  void offer(const Estimate& e, Shape a, Shape b, double norm) {
    double v = std::abs(e.value);
    if (!any || v > out.value) {
      out.value = v;
      out.se = e.se;
      out.a = a;
      out.b = b;
    }
    if (norm > 0 && (!any || v / norm > out.normalized)) {
      out.normalized = v / norm;
      out.normalized_se = e.se / norm;
    }
    any = true;
  }
};

void check_pair(const GameSpec& spec, int i, int j, const std::vector<Shape>& dict) {
  if (i == j) throw std::invalid_argument("asymmetry: players must differ");
  if (i < 0 || j < 0 || i >= spec.n_players || j >= spec.n_players)
    throw std::invalid_argument("asymmetry: player index out of range");
  if (dict.empty()) throw std::invalid_argument("asymmetry: empty direction dictionary");
}

ControlProfile dir_of(const GameSpec& spec, int h, Shape s) {
  return ControlProfile::direction(spec.n_players, spec.horizon, h, s);
}

// Second-order adjoint data for the BSDE route, built once per control.
struct BsdeRoute {
  const GameSpec& spec;
  const NoiseBundle& noise;
  PathEnsemble ens;
  std::vector<AdjointSolution> first;
  std::vector<SecondAdjointSolution> second;
  std::vector<std::vector<SensitivityEnsemble>> Y;  // [player][direction]

  BsdeRoute(const GameSpec& s, const ControlProfile& ctrl, const NoiseBundle& nz, const std::vector<int>& players,
            const std::vector<Shape>& dict, const RegressionBasis& basis)
      : spec(s), noise(nz), ens(simulate_paths(s, ctrl, nz.grid(), nz)) {
    first.resize(s.n_players);
    second.resize(s.n_players);
    Y.resize(s.n_players);
    for (int i : players) {
      first[i] = solve_first_adjoint(s, ens, i, nz, basis);
      second[i] = solve_second_adjoint(s, ens, first[i], nz, basis);
      for (Shape sh : dict) Y[i].push_back(propagate_sensitivity(s, ens, i, dir_of(s, i, sh), nz));
    }
  }

  PairAsymmetry pair(int i, int j, const std::vector<Shape>& dict) const {
    PairMax pm;
    const TimeGrid& g = ens.grid;
    for (size_t a = 0; a < dict.size(); ++a)
      for (size_t b = 0; b < dict.size(); ++b) {
        std::vector<double> di = second_bsde_pathwise(spec, ens, first[i], second[i], Y[i][a], Y[j][b]);
        std::vector<double> dj = second_bsde_pathwise(spec, ens, first[j], second[j], Y[i][a], Y[j][b]);
        for (size_t p = 0; p < di.size(); ++p) di[p] -= dj[p];
        pm.offer(mean_se(di), dict[a], dict[b], direction_norm(dict[a], g) * direction_norm(dict[b], g));
      }
    pm.out.i = i;
    pm.out.j = j;
    return pm.out;
  }
};

PairAsymmetry fd_pair(const GameSpec& spec, const ControlProfile& ctrl, int i, int j, const std::vector<Shape>& dict,
                      const NoiseBundle& noise, const FdOptions& fd) {
  PairMax pm;
  const TimeGrid& g = noise.grid();
  for (Shape a : dict)
    for (Shape b : dict) {
      Eigen::MatrixXd F = second_fd_pathwise(spec, ctrl, i, dir_of(spec, i, a), j, dir_of(spec, j, b), noise, fd);
      std::vector<double> d(F.rows());
      for (int p = 0; p < F.rows(); ++p) d[p] = F(p, i) - F(p, j);
      pm.offer(mean_se(d), a, b, direction_norm(a, g) * direction_norm(b, g));
    }
  pm.out.i = i;
  pm.out.j = j;
  return pm.out;
}

// Every pair at once. Along each path the kernel carries Y for all
// (player, direction) and, for curved dynamics, Z for all pairs.
AsymmetryMatrix z_matrix(const GameSpec& spec, const ControlProfile& ctrl, const std::vector<Shape>& dict,
                         const NoiseBundle& noise) {
  const TimeGrid& g = noise.grid();
  const PathEnsemble ens = simulate_paths(spec, ctrl, g, noise);
  const int n = spec.n_players, nd = static_cast<int>(dict.size()), M = g.n_steps, P = ens.n_paths;
  const bool curved = spec.curved();
  const int npair = n * (n - 1) / 2;
  std::vector<int> pid(static_cast<size_t>(n) * n, -1);
  for (int i = 0, q = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pid[i * n + j] = q++;

  std::vector<double> dv(static_cast<size_t>(M + 1) * nd);
  for (int k = 0; k <= M; ++k)
    for (int a = 0; a < nd; ++a) dv[static_cast<size_t>(k) * nd + a] = shape_value(dict[a], g.t(k), g.horizon);

  const size_t nslot = static_cast<size_t>(npair) * nd * nd;
  std::vector<std::vector<Moments>> parts(block_count(P), std::vector<Moments>(nslot));

  for_blocks(P, [&](int blk, int b0, int b1) {
    NodePartials np(n);
    std::vector<CostPartials> c(n, CostPartials(n));
    std::vector<double> Y(static_cast<size_t>(n) * nd * n), W(Y.size());
    std::vector<double> Z(curved ? nslot * n : 0);
    std::vector<double> D(static_cast<size_t>(n) * n * nd * nd);
    auto y = [&](int h, int a) { return &Y[(static_cast<size_t>(h) * nd + a) * n]; };
    auto z = [&](int q, int a, int b) { return &Z[((static_cast<size_t>(q) * nd + a) * nd + b) * n]; };
    auto dot = [n](const double* u, const double* v) {
      double s = 0.0;
      for (int m = 0; m < n; ++m) s += u[m] * v[m];
      return s;
    };
    for (int p = b0; p < b1; ++p) {
      std::fill(Y.begin(), Y.end(), 0.0);
      std::fill(Z.begin(), Z.end(), 0.0);
      std::fill(D.begin(), D.end(), 0.0);
      for (int k = 0; k <= M; ++k) {
        const bool term = k == M;
        const double t = g.t(k), w = term ? 1.0 : g.dt;
        const double* x = ens.x(p, k);
        const double* u = ens.u(p, k);
        const double* du = &dv[static_cast<size_t>(k) * nd];
        for (int i = 0; i < n; ++i) {
          c[i].clear();
          if (term)
            spec.terminal->eval(i, x, Order::second, c[i]);
          else
            spec.running->eval(i, t, x, u, Order::second, c[i]);
        }
        for (int i = 0; i < n; ++i)
          for (int a = 0; a < nd; ++a) {
            Eigen::Map<Eigen::VectorXd> out(&W[(static_cast<size_t>(i) * nd + a) * n], n);
            out.noalias() = c[i].dyy * Eigen::Map<const Eigen::VectorXd>(y(i, a), n);
          }
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double* ci = c[i].dyu.col(i).data();
            const double* cj = c[i].dyu.col(j).data();
            for (int a = 0; a < nd; ++a) {
              const double* wi = &W[(static_cast<size_t>(i) * nd + a) * n];
              const double* yi = y(i, a);
              for (int b = 0; b < nd; ++b) {
                const double* yj = y(j, b);
                double s = dot(wi, yj);
                if (!term) s += du[a] * dot(ci, yj) + du[b] * dot(cj, yi) + c[i].duu(i, j) * du[a] * du[b];
                if (curved) s += dot(c[i].dy.data(), i < j ? z(pid[i * n + j], a, b) : z(pid[j * n + i], b, a));
                D[((static_cast<size_t>(i) * n + j) * nd + a) * nd + b] += w * s;
              }
            }
          }
        if (term) break;
        const double* dW = noise.dW(p, k);
        np.eval(spec, t, x, u, curved ? Order::second : Order::first);
        if (curved)
          for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
              for (int a = 0; a < nd; ++a)
                for (int b = 0; b < nd; ++b)
                  second_sensitivity_step(np, n, i, j, du[a], du[b], y(i, a), y(j, b), dW, g.dt,
                                          z(pid[i * n + j], a, b));
        for (int h = 0; h < n; ++h)
          for (int a = 0; a < nd; ++a) sensitivity_step(np, n, h, du[a], dW, g.dt, y(h, a));
      }
      std::vector<Moments>& acc = parts[blk];
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int a = 0; a < nd; ++a)
            for (int b = 0; b < nd; ++b) {
              double dij = D[((static_cast<size_t>(i) * n + j) * nd + a) * nd + b];
              double dji = D[((static_cast<size_t>(j) * n + i) * nd + b) * nd + a];
              acc[(static_cast<size_t>(pid[i * n + j]) * nd + a) * nd + b].add(dij - dji);
            }
    }
  });

  std::vector<Moments> tot(nslot);
  for (const auto& part : parts)
    for (size_t s = 0; s < nslot; ++s) tot[s].merge(part[s]);

  AsymmetryMatrix out;
  out.resize(n);
  out.method = Method::z_oracle;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      PairMax pm;
      for (int a = 0; a < nd; ++a)
        for (int b = 0; b < nd; ++b)
          pm.offer(tot[(static_cast<size_t>(pid[i * n + j]) * nd + a) * nd + b].estimate(), dict[a], dict[b],
                   direction_norm(dict[a], g) * direction_norm(dict[b], g));
      pm.out.i = i;
      pm.out.j = j;
      out.set(pm.out);
    }
  return out;
}

}  // namespace

PairAsymmetry asymmetry(const GameSpec& spec, const ControlProfile& ctrl, int i, int j,
                        const std::vector<Shape>& dict, const NoiseBundle& noise, Method method,
                        const AsymmetryOptions& opts) {
  check_pair(spec, i, j, dict);
  switch (method) {
    case Method::fd:
      return fd_pair(spec, ctrl, i, j, dict, noise, opts.fd);
    case Method::bsde: {
      BsdeRoute r(spec, ctrl, noise, {i, j}, dict, opts.basis);
      return r.pair(i, j, dict);
    }
    case Method::z_oracle: {
      AsymmetryMatrix m = z_matrix(spec, ctrl, dict, noise);
      for (const auto& pa : m.pairs)
        if (pa.i == std::min(i, j) && pa.j == std::max(i, j)) return pa;
      break;
    }
    default:
      break;
  }
  throw std::invalid_argument("asymmetry: method must be FD, BSDE or Z-ORACLE");
}

AsymmetryMatrix asymmetry_matrix(const GameSpec& spec, const ControlProfile& ctrl, const std::vector<Shape>& dict,
                                 const NoiseBundle& noise, Method method, const AsymmetryOptions& opts) {
  const int n = spec.n_players;
  if (dict.empty()) throw std::invalid_argument("asymmetry: empty direction dictionary");
  if (method == Method::z_oracle) return z_matrix(spec, ctrl, dict, noise);
  AsymmetryMatrix out;
  out.resize(n);
  out.method = method;
  if (method == Method::fd) {
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) out.set(fd_pair(spec, ctrl, i, j, dict, noise, opts.fd));
    return out;
  }
  if (method != Method::bsde) throw std::invalid_argument("asymmetry: method must be FD, BSDE or Z-ORACLE");
  std::vector<int> all(n);
  for (int i = 0; i < n; ++i) all[i] = i;
  BsdeRoute r(spec, ctrl, noise, all, dict, opts.basis);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.set(r.pair(i, j, dict));
  return out;
}

EmpiricalAlpha empirical_alpha(const GameSpec& spec, const std::vector<ControlProfile>& controls,
                               const std::vector<Shape>& dict, const NoiseBundle& noise, Method method,
                               const AsymmetryOptions& opts) {
  if (controls.empty()) throw std::invalid_argument("empirical_alpha: empty control dictionary");
  EmpiricalAlpha out;
  out.sup.resize(spec.n_players);
  out.sup.method = method;
  bool first = true;
  for (size_t c = 0; c < controls.size(); ++c) {
    AsymmetryMatrix m = asymmetry_matrix(spec, controls[c], dict, noise, method, opts);
    int arg = 0;
    Estimate a = m.alpha(&arg);
    if (first || a.value > out.value) {
      out.value = a.value;
      out.se = a.se;
      out.player = arg;
      out.control_index = static_cast<int>(c);
    }
    for (const auto& pa : m.pairs)
      if (first || pa.value > out.sup.value(pa.i, pa.j)) {
        out.sup.value(pa.i, pa.j) = out.sup.value(pa.j, pa.i) = pa.value;
        out.sup.se(pa.i, pa.j) = out.sup.se(pa.j, pa.i) = pa.se;
      }
    for (const auto& pa : m.pairs)
      if (first || pa.normalized > out.sup.normalized(pa.i, pa.j)) {
        out.sup.normalized(pa.i, pa.j) = out.sup.normalized(pa.j, pa.i) = pa.normalized;
        out.sup.normalized_se(pa.i, pa.j) = out.sup.normalized_se(pa.j, pa.i) = pa.normalized_se;
      }
    out.per_control.push_back(std::move(m));
    first = false;
  }
  return out;
}

}  // namespace ag
