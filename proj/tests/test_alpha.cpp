#include "doctest.h"

#include <cmath>

#include "ag/alpha/asymmetry.hpp"
#include "ag/alpha/bounds.hpp"
#include "ag/alpha/potential.hpp"
#include "ag/bsde/backward.hpp"
#include "ag/model/presets.hpp"

using namespace ag;

namespace {

ConstantLedger flat_ledger(int n, double Lb, double Lyb, double Ls, double Lys) {
  ConstantLedger L;
  L.n_players = n;
  L.L_b = Lb, L.L_y_b = Lyb, L.L_sigma = Ls, L.L_y_sigma = Lys;
  L.refresh();
  L.gaps.assign(static_cast<size_t>(n) * n, CostGapNorms{});
  for (auto& g : L.gaps) {
    g.resize(n);
    g.fxx.setConstant(0.1);
    g.gxx.setConstant(0.05);
  }
  return L;
}

// identical deviation costs, no mean coupling in the dynamics
LqParams potential_lq(int n) {
  LqParams p = LqParams::symmetric(n);
  p.Abar.setZero();
  p.Cbar.setZero();
  for (int i = 0; i < n; ++i) p.A[i] = -0.5 + 0.3 * i;
  return p;
}

}  // namespace

TEST_SUITE("alpha") {

TEST_CASE("direction norms") {
  TimeGrid grid(10, 2.0);
  CHECK(direction_norm(Shape::one, grid) == doctest::Approx(std::sqrt(2.0)));
  double s = 0.0;
  for (int k = 0; k < 10; ++k) s += std::pow(grid.t(k) / 2.0, 2) * grid.dt;
  CHECK(direction_norm(Shape::ramp, grid) == doctest::Approx(std::sqrt(s)));
}

TEST_CASE("alpha is twice the largest row sum") {
  AsymmetryMatrix m;
  m.resize(3);
  m.set({0, 1, 0.2, 0.01});
  m.set({0, 2, 0.1, 0.01});
  m.set({1, 2, 0.4, 0.02});
  CHECK(m.value(1, 0) == 0.2);
  CHECK(m.value(2, 2) == 0.0);
  int row = -1;
  Estimate a = m.alpha(&row);
  CHECK(row == 1);
  CHECK(a.value == doctest::Approx(2.0 * 0.6));
}

TEST_CASE("identical costs give a symmetric cross Hessian") {
  GameWithLedger g = build_lq_game(potential_lq(3));
  TimeGrid grid(15, 1.0);
  NoiseBundle nb = make_noise(g.spec, grid, 1, 2000);
  ControlProfile u = ControlProfile::zero(3, 1.0);
  u.coef(0, Shape::one) = 0.2;
  AsymmetryMatrix m = asymmetry_matrix(g.spec, u, {Shape::one, Shape::sine}, nb, Method::z_oracle);
  for (const auto& pa : m.pairs) CHECK(pa.value <= 3.0 * pa.se + 1e-12);
}

TEST_CASE("heterogeneous costs: finite differences and the Z oracle agree") {
  GameWithLedger g = build_lq_game(LqParams::heterogeneous(3));
  TimeGrid grid(15, 1.0);
  NoiseBundle nb = make_noise(g.spec, grid, 2, 1000);
  ControlProfile u = ControlProfile::zero(3, 1.0);
  std::vector<Shape> dict{Shape::one, Shape::ramp};
  PairAsymmetry z = asymmetry(g.spec, u, 0, 2, dict, nb, Method::z_oracle);
  PairAsymmetry f = asymmetry(g.spec, u, 0, 2, dict, nb, Method::fd);
  CHECK(z.value > 10.0 * z.se);
  CHECK(z.value == doctest::Approx(f.value).epsilon(1e-6));
  AsymmetryMatrix m = asymmetry_matrix(g.spec, u, dict, nb, Method::z_oracle);
  CHECK(m.value(0, 2) == doctest::Approx(z.value).epsilon(1e-12));
  EmpiricalAlpha ea = empirical_alpha(g.spec, {u, u * 2.0}, dict, nb, Method::z_oracle);
  CHECK(ea.value >= m.alpha().value - 1e-12);
}

TEST_CASE("potential: zero at the anchor, cost change for one player") {
  LqParams p = LqParams::symmetric(1);
  p.A.setConstant(-0.4);
  GameWithLedger g = build_lq_game(p);
  TimeGrid grid(20, 1.0);
  NoiseBundle nb = make_noise(g.spec, grid, 3, 4000);
  ControlProfile z = ControlProfile::zero(1, 1.0), a = z;
  a.coef(0, Shape::one) = 0.5;
  a.coef(0, Shape::sine) = -0.3;
  CHECK(potential_value(g.spec, a, a, nb).value == 0.0);
  PotentialEstimate phi = potential_value(g.spec, z, a, nb);
  // one player: V(a) - V(z) = R/2 int |u|^2 dt, sampled on the left endpoints
  double exact = 0.0;
  for (int k = 0; k < 20; ++k) exact += 0.5 * std::pow(a.deterministic_part(0, grid.t(k)), 2) * grid.dt;
  CHECK(phi.value == doctest::Approx(exact).epsilon(1e-3));
}

TEST_CASE("potential deviation gap vanishes for identical costs") {
  GameWithLedger g = build_lq_game(potential_lq(2));
  TimeGrid grid(15, 1.0);
  NoiseBundle nb = make_noise(g.spec, grid, 4, 2000);
  ControlProfile z = ControlProfile::zero(2, 1.0), a = z, dev = z;
  a.coef(0, Shape::one) = 0.3;
  a.coef(1, Shape::ramp) = -0.2;
  dev.coef(1, Shape::sine) = 0.6;
  DeviationGap gap = potential_deviation_gap(g.spec, a, 1, dev, z, nb);
  CHECK(std::abs(gap.dV.value) > 10.0 * gap.dV.se);
  CHECK(gap.gap <= 3.0 * gap.se + 1e-10);
  ControlProfile un = unilateral(a, 1, dev);
  CHECK(un.coef(0, Shape::one) == 0.3);
  CHECK(un.coef(1, Shape::ramp) == 0.0);
  CHECK(un.coef(1, Shape::sine) == 0.6);
}

TEST_CASE("zero control is unexploitable when only the control is penalized") {
  GameWithLedger g = build_lq_game(LqParams::symmetric(1));
  TimeGrid grid(10, 1.0);
  NoiseBundle nb = make_noise(g.spec, grid, 5, 1000);
  ControlProfile z = ControlProfile::zero(1, 1.0);
  std::vector<Deviation> devs;
  for (double c : {-0.5, 0.5}) devs.push_back({0, ControlProfile::direction(1, 1.0, 0, Shape::one, c)});
  Exploitability ex = exploitability(g.spec, z, devs, nb);
  CHECK(ex.value <= 3.0 * ex.se + 1e-12);
  for (const auto& gn : ex.gains) CHECK(gn.value < 0.0);
}

TEST_CASE("family profile layout") {
  Eigen::VectorXd th(4);
  th << 1, 2, 3, 4;
  ControlProfile u = family_profile(2, 1.0, {Shape::one, Shape::ramp}, th);
  CHECK(u.coef(0, Shape::one) == 1);
  CHECK(u.coef(0, Shape::ramp) == 2);
  CHECK(u.coef(1, Shape::one) == 3);
  CHECK(u.coef(1, Shape::ramp) == 4);
}

TEST_CASE("state moment constant by hand") {
  // only L_b = 1, p = 2, T = 1, E|xi|^2 = 1, no control:
  // I0 = 1 + 1, I1 = 3p - 2 = 4, I2 = 3p - 2 = 4, C_X = 2 e^4
  ConstantLedger L = flat_ledger(2, 1.0, 0.0, 0.0, 0.0);
  MomentConstants m = moment_bound_constants(L, 2.0, {1.0, 1.0}, {0.0, 0.0}, 1.0);
  CHECK(m.CX[0] == doctest::Approx(2.0 * std::exp(4.0)));
  CHECK(m.I1 == doctest::Approx(4.0));
  // grows with every ledger constant
  for (int k = 0; k < 4; ++k) {
    double c[4] = {1.0, 0.2, 0.3, 0.1};
    ConstantLedger lo = flat_ledger(2, c[0], c[1], c[2], c[3]);
    c[k] *= 1.5;
    ConstantLedger hi = flat_ledger(2, c[0], c[1], c[2], c[3]);
    CHECK(moment_bound_constants(hi, 4.0, {1, 1}, {0.5, 0.5}, 1.0).CX[1] >
          moment_bound_constants(lo, 4.0, {1, 1}, {0.5, 0.5}, 1.0).CX[1]);
  }
  CHECK_THROWS_AS(moment_bound_constants(L, 1.0, {1, 1}, {0, 0}, 1.0), std::invalid_argument);
}

TEST_CASE("sensitivity moment bound: own and cross players") {
  ConstantLedger L = flat_ledger(3, 0.5, 0.0, 0.2, 0.0);
  // without mean coupling only the perturbed player moves
  CHECK(sensitivity_moment_bound(L, 2.0, 1.0, 1.0, 0, 1).value == 0.0);
  CHECK(sensitivity_moment_bound(L, 2.0, 1.0, 1.0, 0, 0).value > 0.0);
  CHECK(sensitivity_moment_bound(L, 2.0, 2.0, 1.0, 0, 0).value ==
        doctest::Approx(2.0 * sensitivity_moment_bound(L, 2.0, 1.0, 1.0, 0, 0).value));
}

TEST_CASE("pair bounds") {
  CHECK(lq_pair_bound(1.0, 1.5, 0.5, 0.2, 4, 0.16) == doctest::Approx(0.8 / 4 + 0.4 / 16));
  CHECK(lq_pair_bound(1.0, 1.5, 0.5, 0.2, 4, 0.16, 3.0) == doctest::Approx(3.0 * lq_pair_bound(1.0, 1.5, 0.5, 0.2, 4, 0.16)));

  CostGapNorms g;
  g.resize(2);
  g.gx0 << 1, 0;
  g.fxx(0, 1) = 2;
  CHECK(lambda1(g, 10.0, 0.5) == doctest::Approx(10.0 * (1.0 + 3.0 * 0.5 * 4.0)));

  // with uncontrolled, state-free diffusion the reduced pair constant is the general one
  ConstantLedger L = flat_ledger(3, 0.7, 0.3, 0.0, 0.0);
  BoundLedger B = make_bound_ledger(L, 1.0, 3);
  CHECK(B.drivers == 0);
  CHECK(B.apriori == doctest::Approx(apriori_constant(B.B0_norm, 0, 1.0)));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(no_diffusion_pair_bound(L, B, i, j) == doctest::Approx(pair_bound(L, B, i, j).total));

  AlphaBound ab = theoretical_alpha_bound(L, B);
  double best = 0.0;
  for (int i = 0; i < 3; ++i) best = std::max(best, ab.ctilde.row(i).sum());
  CHECK(ab.alpha == doctest::Approx(best));
  B.C = 2.0;
  CHECK(theoretical_alpha_bound(L, B).alpha > ab.alpha);
  CHECK_THROWS_AS(pair_bound(L, B, 1, 1), std::invalid_argument);
}

TEST_CASE("power-law gap bound") {
  ConstantLedger L = flat_ledger(2, 0.5, 0.5, 0.5, 0.5);
  BoundLedger B = make_bound_ledger(L, 1.0, 2);
  CHECK(cor2_bound(0.5, 0.0, 0.75, 8, B).total == 0.0);
  double prev = INFINITY;
  for (int n : {2, 4, 8, 16, 32}) {
    double t = cor2_bound(0.5, 1.0, 0.75, n, B).total;
    CHECK(t < prev);
    prev = t;
  }
  CHECK(cor2_bound(0.5, 2.0, 0.75, 8, B).total == doctest::Approx(2.0 * cor2_bound(0.5, 1.0, 0.75, 8, B).total));
  CHECK_THROWS_AS(cor2_bound(0.5, 1.0, 0.5, 8, B), std::invalid_argument);
}

}
