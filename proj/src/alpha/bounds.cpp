#include "ag/alpha/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ag/bsde/backward.hpp"

namespace ag {

namespace {

double sq(double x) { return x * x; }

double lybs(const ConstantLedger& L) { return L.L_y_b + 3.0 * L.L_y_sigma * L.L_y_sigma; }

void check_ledger(const ConstantLedger& L) {
  if (L.n_players < 1) throw std::invalid_argument("bounds: ledger has no players");
  if (L.gaps.size() != static_cast<size_t>(L.n_players) * L.n_players)
    throw std::invalid_argument("bounds: ledger is missing cost gap norms");
  for (double v : {L.L_b, L.L_y_b, L.L_sigma, L.L_y_sigma})
    if (!(v >= 0)) throw std::invalid_argument("bounds: ledger constants must be nonnegative");
}

double c1bs(double Lb, double Lyb, double Ls, double Lys) {
  const double l = Lyb + 3.0 * Lys * Lys;
  const double K = 1.0 + l + l * l;
  return Lyb + l * Lyb + Lyb * l * l + Lb * l * l + 2.0 * Lyb * K + 2.0 * Lb * l + Lyb + Lys + l * Lys +
         Lys * l * l + Ls * l * l + 2.0 * Lys * K + 2.0 * Ls * l + Lys;
}

double c2bs(double Lyb, double Lys) {
  const double l = Lyb + 3.0 * Lys * Lys;
  return (Lyb + Lys) * l * l;
}

// Cross-index sums of the gap Hessians used by the pair constants.
struct GapSums {
  double c0 = 0.0, s1 = 0.0, s2f = 0.0, s2g = 0.0;
};

GapSums gap_sums(const CostGapNorms& g, int n, int i, int j) {
  GapSums s;
  s.c0 = g.fxx(i, j) + g.fxu(i, j) + g.fxu(j, i) + g.fuu(i, j) + g.gxx(i, j);
  for (int l = 0; l < n; ++l)
    if (l != j) s.s1 += g.fxx(i, l) + g.fxu(l, i) + g.gxx(i, l);
  for (int h = 0; h < n; ++h)
    if (h != i) s.s1 += g.fxx(h, j) + g.fxu(h, j) + g.gxx(h, j);
  for (int h = 0; h < n; ++h) {
    if (h == i) continue;
    for (int l = 0; l < n; ++l) {
      if (l == j) continue;
      s.s2f += g.fxx(h, l);
      s.s2g += g.gxx(h, l);
    }
  }
  return s;
}

}  // namespace

double lambda1(const CostGapNorms& g, double apriori, double horizon) {
  double s = g.gx0.squaredNorm() + g.gxx.squaredNorm();
  s += 3.0 * horizon * (g.fx0.squaredNorm() + g.fxx.squaredNorm() + g.fxu.squaredNorm());
  return apriori * s;
}

BoundLedger make_bound_ledger(const ConstantLedger& L, double horizon, int drivers) {
  check_ledger(L);
  if (!(horizon > 0)) throw std::invalid_argument("bounds: horizon must be positive");
  const int n = L.n_players;
  BoundLedger B;
  B.n_players = n;
  B.horizon = horizon;
  B.B0_norm = L.L_b + L.L_y_b * (2.0 / n - 1.0 / (static_cast<double>(n) * n));
  B.Pi0_norm = L.L_sigma + L.L_y_sigma / std::sqrt(static_cast<double>(n));
  // z terms only enter the driver through diffusion coefficients that can be nonzero
  B.drivers = B.Pi0_norm > 0 ? drivers : 0;
  B.apriori = apriori_constant(std::max(B.B0_norm, B.Pi0_norm), B.drivers, horizon);
  B.lambda1 = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) B.lambda1(i, j) = lambda1(L.gap(i, j), B.apriori, horizon);
  B.C1bs = c1bs(L.L_b, L.L_y_b, L.L_sigma, L.L_y_sigma);
  B.C2bs = c2bs(L.L_y_b, L.L_y_sigma);
  return B;
}

PairBound pair_bound(const ConstantLedger& L, const BoundLedger& B, int i, int j) {
  check_ledger(L);
  const int n = L.n_players;
  if (i == j) throw std::invalid_argument("bounds: pair needs two different players");
  const double Lb = L.L_b, Lyb = L.L_y_b, Ls = L.L_sigma, Lys = L.L_y_sigma, l = lybs(L);
  const double K = 1.0 + l + l * l;
  PairBound pb;
  pb.i = i;
  pb.j = j;
  pb.lambda1 = B.lambda1(i, j);
  const double rl = B.C * std::sqrt(pb.lambda1);
  GapSums s = gap_sums(L.gap(i, j), n, i, j);
  pb.c0 = s.c0;
  pb.c1 = l * s.s1 + rl * (Lys * K + (Ls * l * l + 2.0 * Lys) * K + 2.0 * l * (Ls + Lys) + Lyb * K +
                           (Lb * l * l + 2.0 * Lyb) * K + 2.0 * l * (Lb + Lyb));
  // both double sums carry the squared coupling factor
  pb.c2 = l * l * (s.s2f + s.s2g) + rl * l * l * (Lys + Lyb);
  pb.total = pb.c0 + pb.c1 / n + pb.c2 / sq(n);
  return pb;
}

AlphaBound theoretical_alpha_bound(const ConstantLedger& L, const BoundLedger& B) {
  check_ledger(L);
  const int n = L.n_players;
  if (B.n_players != n || B.lambda1.rows() != n) throw std::invalid_argument("bounds: bound ledger size mismatch");
  AlphaBound out;
  out.n_players = n;
  out.C = B.C;
  out.ctilde = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      PairBound pb = pair_bound(L, B, i, j);
      out.ctilde(i, j) = pb.total;
      out.pairs.push_back(pb);
    }
  for (int i = 0; i < n; ++i) {
    double s = out.ctilde.row(i).sum();
    if (i == 0 || B.C * s > out.alpha) {
      out.alpha = B.C * s;
      out.argmax = i;
    }
  }
  out.note = "outer constant C reported separately (value " + std::to_string(B.C) + ")";
  out.note += L.sampled ? "; cost gap norms sampled on a box" : "; cost gap norms analytic";
  return out;
}

double no_diffusion_pair_bound(const ConstantLedger& L, const BoundLedger& B, int i, int j) {
  check_ledger(L);
  if (i == j) throw std::invalid_argument("bounds: pair needs two different players");
  const int n = L.n_players;
  const double Lb = L.L_b, Ly = L.L_y_b;
  const double K = 1.0 + Ly + Ly * Ly;
  GapSums s = gap_sums(L.gap(i, j), n, i, j);
  double v = s.c0 + Ly / n * s.s1 + Ly * Ly / sq(n) * (s.s2f + s.s2g);
  v += B.C * Ly * std::sqrt(B.lambda1(i, j)) *
       ((K + (Lb * Ly + 2.0) * K + 2.0 * (Lb + Ly)) / n + Ly * Ly / sq(n));
  return v;
}

double lq_pair_bound(double Qi, double Qj, double Gi, double Gj, int n, double lambda1, double C) {
  if (n < 1) throw std::invalid_argument("bounds: need players");
  return C * ((std::abs(Qi - Qj) + std::abs(Gi - Gj)) / n + std::sqrt(lambda1) / sq(n));
}

Cor2Terms cor2_bound(double L, double L_tilde, double beta, int n, const BoundLedger& B) {
  if (!(beta > 0.5)) throw std::invalid_argument("cor2_bound: beta must exceed 1/2");
  if (n < 1) throw std::invalid_argument("cor2_bound: need players");
  if (L < 0 || L_tilde < 0) throw std::invalid_argument("cor2_bound: constants must be nonnegative");
  const double N = n, l = L + 3.0 * L * L;
  Cor2Terms t;
  t.C1bs = c1bs(L, L, L, L);
  t.C2bs = c2bs(L, L);
  t.gap_term = L_tilde / std::pow(N, 2.0 * beta) * (B.C + 2.0 * l + 2.0 * l * l);
  t.coupling_term = 4.0 * l * L_tilde / std::pow(N, 1.0 + std::min(beta, 2.0 * beta - 1.0));
  // sqrt(lambda1) is linear in the gap size L_tilde
  t.lambda_term = B.C * std::sqrt(B.apriori) * L_tilde * std::max(t.C1bs, t.C2bs) / std::pow(N, (beta + 1.0) / 2.0);
  t.total = t.gap_term + t.coupling_term + t.lambda_term;
  return t;
}

MomentConstants moment_bound_constants(const ConstantLedger& L, double p, const std::vector<double>& xi_moment,
                                       const std::vector<double>& control_norm, double horizon) {
  if (!(p >= 2)) throw std::invalid_argument("moment bounds: need p >= 2");
  const int n = L.n_players;
  if (static_cast<int>(xi_moment.size()) != n || static_cast<int>(control_norm.size()) != n)
    throw std::invalid_argument("moment bounds: need one moment and one control norm per player");
  const double Lb = L.L_b, Lyb = L.L_y_b, Ls = L.L_sigma, Lys = L.L_y_sigma, T = horizon;
  MomentConstants m;
  m.p = p;
  const double a = Lb + 4.0 * (p - 1.0) * Ls * Ls;
  m.I1 = (6.0 * Ls * Ls + 2.0 * Lys * Lys) * p * p + (3.0 * Lb + Lyb + 14.0 * Ls * Ls - 2.0 * Lys * Lys) * p -
         2.0 * Lb + 8.0 * Ls * Ls;
  m.I2 = Lb * (3.0 * p - 2.0) + Lyb * (p - 1.0) + 2.0 * (p - 1.0) * (3.0 * p - 4.0) * Ls * Ls +
         2.0 * (p - 1.0) * (p - 2.0) * Lys * Lys;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    m.I0.push_back(xi_moment[i] + a * T + a * control_norm[i]);
    sum += m.I0.back();
  }
  const double cross = (Lyb + 4.0 * (p - 1.0) * Lys * Lys) / n * sum * std::exp(m.I1 * T);
  for (int i = 0; i < n; ++i) m.CX.push_back((m.I0[i] + cross) * std::exp(m.I2 * T));
  return m;
}

SensitivityBound sensitivity_moment_bound(const ConstantLedger& L, double p, double direction_norm, double horizon,
                                          int h, int i) {
  if (!(p >= 2)) throw std::invalid_argument("sensitivity bound: need p >= 2");
  const int n = L.n_players;
  if (h < 0 || i < 0 || h >= n || i >= n) throw std::invalid_argument("sensitivity bound: player out of range");
  const double Lb = L.L_b, Lyb = L.L_y_b, Ls = L.L_sigma, Lys = L.L_y_sigma, T = horizon;
  SensitivityBound s;
  s.I3 = p * Lb + Lyb * p + 1.5 * (p - 1.0) * p * (Ls * Ls + Lys * Lys) + (p - 1.0) * (1.5 * p - 2.0);
  s.I4 = s.I3 - 3.0 * (p - 1.0) * Lys * Lys - Lyb;
  double cross = (Lyb + Lys * Lys * 3.0 * (p - 1.0)) / n * T * std::exp(s.I3 * T) * (Lb + 3.0 * (p - 1.0) * Ls);
  double own = h == i ? 3.0 * p - 2.0 : 0.0;
  s.value = (cross + own) * std::exp(s.I4 * T) * direction_norm;
  return s;
}

}  // namespace ag
