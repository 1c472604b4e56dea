#include "doctest.h"

#include <cmath>

#include "ag/derivatives/derivatives.hpp"
#include "ag/model/presets.hpp"

using namespace ag;

namespace {

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / v.size();
}

struct Setup {
  GameWithLedger g;
  TimeGrid grid;
  NoiseBundle noise;
  ControlProfile u;
  PathEnsemble ens;
};

Setup setup(GameWithLedger g, int M, int P, std::uint64_t seed, ControlProfile u) {
  Setup s{std::move(g), {}, {}, std::move(u), {}};
  s.grid = TimeGrid(M, s.g.spec.horizon);
  s.noise = make_noise(s.g.spec, s.grid, seed, P);
  s.ens = simulate_paths(s.g.spec, s.u, s.grid, s.noise);
  return s;
}

}  // namespace

TEST_SUITE("derivatives") {

TEST_CASE("Richardson weights cancel the eps^2 and eps^4 terms") {
  std::vector<double> eps{1e-2, 5e-3, 2.5e-3};
  auto w = richardson_weights(eps);
  double s0 = 0, s2 = 0, s4 = 0;
  for (int k = 0; k < 3; ++k) {
    s0 += w[k];
    s2 += w[k] * eps[k] * eps[k];
    s4 += w[k] * std::pow(eps[k], 4);
  }
  CHECK(s0 == doctest::Approx(1.0));
  CHECK(std::abs(s2) < 1e-15);
  CHECK(std::abs(s4) < 1e-19);
  // a central difference of sin with these weights is accurate to eps^6
  double est = 0.0;
  for (int k = 0; k < 3; ++k) est += w[k] * (std::sin(0.3 + eps[k]) - std::sin(0.3 - eps[k])) / (2 * eps[k]);
  CHECK(std::abs(est - std::cos(0.3)) < 1e-12);
  CHECK(richardson_weights({0.1}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(richardson_weights({}), std::invalid_argument);
  CHECK_THROWS_AS(richardson_weights({1, 2, 3, 4}), std::invalid_argument);
  CHECK_THROWS_AS(richardson_weights({0.1, -0.1}), std::invalid_argument);
}

TEST_CASE("method names") {
  for (Method m : {Method::fd, Method::sens, Method::bsde, Method::z_oracle})
    CHECK(method_from_name(method_name(m)) == m);
  CHECK(method_name(Method::z_oracle) == "Z-ORACLE");
  CHECK_THROWS(method_from_name("adjoint"));
}

TEST_CASE("single player: the gradient is R u T for every method") {
  // with one player the deviation cost vanishes and only R u^2 / 2 is left
  LqParams p = LqParams::symmetric(1);
  p.R.setConstant(1.5);
  ControlProfile u = ControlProfile::zero(1, 1.0);
  u.coef(0, Shape::one) = 0.4;
  Setup s = setup(build_lq_game(p), 20, 2000, 1, u);
  ControlProfile d = ControlProfile::direction(1, 1.0, 0, Shape::one);
  const double exact = 1.5 * 0.4 * 1.0;
  auto fd = first_derivative_fd(s.g.spec, u, 0, 0, d, s.noise);
  Eigen::MatrixXd sens = first_sens_streaming(s.g.spec, s.ens, 0, d, s.noise);
  AdjointSolution adj = solve_first_adjoint(s.g.spec, s.ens, 0, s.noise);
  auto bsde = first_derivative_bsde(s.g.spec, s.ens, adj, 0, d);
  CHECK(fd.value == doctest::Approx(exact).epsilon(1e-9));
  CHECK(sens.col(0).mean() == doctest::Approx(exact).epsilon(1e-12));
  CHECK(bsde.value == doctest::Approx(exact).epsilon(1e-9));
  CHECK(fd.std_error < 1e-9);
}

TEST_CASE("quadratic costs: finite differences equal the first variation pathwise") {
  ControlProfile u = ControlProfile::zero(3, 1.0);
  u.coef(0, Shape::one) = 0.3;
  u.coef(2, Shape::sine) = -0.2;
  LqParams p = LqParams::heterogeneous(3);
  p.D.setConstant(0.25);
  Setup s = setup(build_lq_game(p), 20, 1000, 2, u);
  for (Shape sh : {Shape::one, Shape::half}) {
    ControlProfile d = ControlProfile::direction(3, 1.0, 1, sh);
    Eigen::MatrixXd fd = first_fd_pathwise(s.g.spec, u, 1, d, s.noise);
    Eigen::MatrixXd sens = first_sens_streaming(s.g.spec, s.ens, 1, d, s.noise);
    CHECK((fd - sens).cwiseAbs().maxCoeff() < 1e-8 * (1.0 + sens.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("adjoint gradient agrees with finite differences") {
  ControlProfile u = ControlProfile::zero(3, 1.0);
  u.coef(0, Shape::one) = 0.3;
  u.coef(1, Shape::sine) = 0.2;
  Setup s = setup(build_tanh_game(TanhParams::gentle(3)), 25, 20000, 3, u);
  for (int i = 0; i < 3; ++i) {
    AdjointSolution adj = solve_first_adjoint(s.g.spec, s.ens, i, s.noise);
    BsdeGradient grad = first_bsde_gradient(s.g.spec, s.ens, adj);
    for (int h = 0; h < 3; ++h) {
      ControlProfile d = ControlProfile::direction(3, 1.0, h, Shape::ramp);
      auto fd = first_derivative_fd(s.g.spec, u, i, h, d, s.noise);
      Estimate b = mean_se(first_bsde_pathwise(grad, s.ens, h, d));
      CAPTURE(i);
      CAPTURE(h);
      CHECK(std::abs(fd.value - b.value) <= 3.0 * (fd.std_error + b.se) + 1e-4);
    }
  }
}

TEST_CASE("second derivatives: Z oracle equals finite differences on quadratic costs") {
  ControlProfile u = ControlProfile::zero(2, 1.0);
  u.coef(0, Shape::one) = 0.2;
  Setup s = setup(build_lq_game(LqParams::heterogeneous(2)), 20, 1000, 4, u);
  ControlProfile dh = ControlProfile::direction(2, 1.0, 0, Shape::one);
  ControlProfile dl = ControlProfile::direction(2, 1.0, 1, Shape::sine);
  auto Yh = propagate_sensitivity(s.g.spec, s.ens, 0, dh, s.noise);
  auto Yl = propagate_sensitivity(s.g.spec, s.ens, 1, dl, s.noise);
  auto Z = propagate_second_sensitivity(s.g.spec, s.ens, Yh, Yl, s.noise);
  Eigen::MatrixXd fd = second_fd_pathwise(s.g.spec, u, 0, dh, 1, dl, s.noise);
  for (int i = 0; i < 2; ++i) {
    auto z = second_z_pathwise(s.g.spec, s.ens, Yh, Yl, Z, i);
    double worst = 0.0;
    for (int p = 0; p < 1000; ++p) worst = std::max(worst, std::abs(z[p] - fd(p, i)));
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("second derivatives: adjoint route agrees with the Z oracle and its bias shrinks with M") {
  ControlProfile u = ControlProfile::zero(3, 1.0);
  u.coef(0, Shape::one) = 0.3;
  std::vector<double> gaps;
  for (int M : {8, 32}) {
    Setup s = setup(build_tanh_game(TanhParams::gentle(3)), M, 20000, 5, u);
    ControlProfile dh = ControlProfile::direction(3, 1.0, 0, Shape::one);
    ControlProfile dl = ControlProfile::direction(3, 1.0, 2, Shape::one);
    auto Yh = propagate_sensitivity(s.g.spec, s.ens, 0, dh, s.noise);
    auto Yl = propagate_sensitivity(s.g.spec, s.ens, 2, dl, s.noise);
    auto Z = propagate_second_sensitivity(s.g.spec, s.ens, Yh, Yl, s.noise);
    AdjointSolution first = solve_first_adjoint(s.g.spec, s.ens, 0, s.noise);
    SecondAdjointSolution second = solve_second_adjoint(s.g.spec, s.ens, first, s.noise);
    auto z = second_z_pathwise(s.g.spec, s.ens, Yh, Yl, Z, 0);
    auto b = second_bsde_pathwise(s.g.spec, s.ens, first, second, Yh, Yl);
    std::vector<double> diff(z.size());
    for (size_t p = 0; p < z.size(); ++p) diff[p] = b[p] - z[p];
    Estimate g = mean_se(diff);
    CAPTURE(M);
    CAPTURE(g.value);
    CAPTURE(mean(z));
    // O(dt) bias: about 13% of the value at M = 8
    if (M == 32) CHECK(std::abs(g.value) <= 0.1 * std::abs(mean(z)) + 3.0 * g.se);
    gaps.push_back(std::abs(g.value));
  }
  CHECK(gaps[1] < gaps[0]);
}

TEST_CASE("cost estimates and argument checks") {
  Setup s = setup(build_lq_game(LqParams::heterogeneous(2)), 10, 500, 6, ControlProfile::zero(2, 1.0));
  Eigen::MatrixXd c = pathwise_costs(s.g.spec, s.ens);
  Eigen::MatrixXd c2 = simulate_costs(s.g.spec, s.u, s.noise);
  CHECK((c - c2).cwiseAbs().maxCoeff() == 0.0);
  auto v = cost_value(s.g.spec, s.ens);
  CHECK(v[1].value == doctest::Approx(c.col(1).mean()));
  ControlProfile d = ControlProfile::direction(2, 1.0, 0, Shape::one);
  CHECK_THROWS_AS(first_fd_pathwise(s.g.spec, s.u, 2, d, s.noise), std::invalid_argument);
  CHECK_THROWS_AS(second_fd_pathwise(s.g.spec, s.u, 0, d, 0, d, s.noise), std::invalid_argument);
}

}
