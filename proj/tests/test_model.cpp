#include "doctest.h"

#include <cmath>

#include "ag/model/controls.hpp"
#include "ag/model/fd_wrapper.hpp"
#include "ag/model/noise.hpp"
#include "ag/model/presets.hpp"
#include "ag/model/validate.hpp"

using namespace ag;

namespace {

std::vector<GameWithLedger> all_presets() {
  return {build_lq_game(LqParams::symmetric(3)),          build_lq_game(LqParams::heterogeneous(4)),
          build_mean_field_game(MeanFieldParams::heterogeneous(3)),
          build_common_noise_game(CommonNoiseParams::heterogeneous(3)),
          build_common_noise_game(CommonNoiseParams::identical_costs(2)), build_tanh_game(TanhParams::gentle(3))};
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("every preset passes its own ledger") {
  for (const auto& g : all_presets()) {
    CAPTURE(g.spec.name);
    g.spec.check();
    ValidationReport r = validate_game(g.spec, g.ledger, g.box);
    CHECK(r.passed);
    const ValidationEntry* w = r.worst();
    REQUIRE(w);
    CHECK(w->worst_ratio <= 1.0);
  }
}

TEST_CASE("validation samples stay inside the box") {
  // worst points are reported as (t, x, y..., u)
  for (const auto& g : all_presets()) {
    ValidationReport r = validate_game(g.spec, g.ledger, g.box);
    for (const auto& e : r.entries) {
      REQUIRE(e.point.size() >= 2);
      CHECK(e.point[0] >= 0.0);
      CHECK(e.point[0] <= g.spec.horizon);
      for (size_t k = 1; k + 1 < e.point.size(); ++k) CHECK(std::abs(e.point[k]) <= g.box.state + 1e-12);
      CHECK(std::abs(e.point.back()) <= g.box.control + 1e-12);
    }
  }
}

TEST_CASE("analytic partials match central differences") {
  for (const auto& g : all_presets()) {
    CAPTURE(g.spec.name);
    PartialCheck pc = check_partials(g.spec, g.box, 64);
    CHECK(pc.worst_rel_error <= 1e-5);
  }
}

TEST_CASE("a ledger that is too small is caught") {
  GameWithLedger g = build_tanh_game(TanhParams::gentle(3));
  ConstantLedger L = g.ledger;
  L.L_b *= 0.1;
  L.L_sigma *= 0.1;
  CHECK_FALSE(validate_game(g.spec, L, g.box).passed);
}

TEST_CASE("deviation cost Hessian for two players") {
  // Q/2 (y0 - mean)^2 = Q/8 (y0 - y1)^2
  LqParams p = LqParams::symmetric(2);
  p.Q.setConstant(1.6);
  GameWithLedger g = build_lq_game(p);
  CostPartials cp(2);
  double y[2] = {0.7, -0.2}, u[2] = {0.3, 0.1};
  g.spec.running->eval(0, 0.2, y, u, Order::second, cp);
  CHECK(cp.v == doctest::Approx(1.6 / 8.0 * 0.81 + 0.5 * 1.0 * 0.09));
  CHECK(cp.dy[0] == doctest::Approx(1.6 / 4.0 * 0.9));
  CHECK(cp.dy[1] == doctest::Approx(-1.6 / 4.0 * 0.9));
  CHECK(cp.dyy(0, 0) == doctest::Approx(0.4));
  CHECK(cp.dyy(0, 1) == doctest::Approx(-0.4));
  CHECK(cp.dyy(1, 1) == doctest::Approx(0.4));
  CHECK(cp.duu(0, 0) == doctest::Approx(1.0));
  CHECK(cp.duu(1, 1) == doctest::Approx(0.0));
  // two identical players have identical deviation Hessians up to relabeling
  CHECK(g.ledger.gap(0, 1).fxx.norm() == doctest::Approx(0.0));
}

TEST_CASE("identical deviation costs still differ as Hessians for three players") {
  LqParams p = LqParams::symmetric(3);
  GameWithLedger g = build_lq_game(p);
  // |Q ((e_0 - 1/3)(e_0 - 1/3)^T - (e_1 - 1/3)(e_1 - 1/3)^T)| at (0, 0)
  CHECK(g.ledger.gap(0, 1).fxx(0, 0) == doctest::Approx(p.Q[0] * (4.0 / 9.0 - 1.0 / 9.0)));
  CHECK(g.ledger.gap(0, 1).fxx(2, 2) == doctest::Approx(0.0));
  CHECK(g.ledger.gap(0, 1).gxx(0, 1) == doctest::Approx(0.0));
}

TEST_CASE("preset parameter checks") {
  LqParams p = LqParams::symmetric(2);
  p.R[1] = 0.0;
  CHECK_THROWS_AS(build_lq_game(p), std::invalid_argument);
  TanhParams t = TanhParams::gentle(2);
  t.control_bound = -1;
  CHECK_THROWS_AS(build_tanh_game(t), std::invalid_argument);
  CHECK_THROWS_AS(LqParams::symmetric(0), std::invalid_argument);
}

TEST_CASE("fd wrapper reproduces hand partials") {
  auto fn = [](int, double t, double x, const double* y, double u) { return std::sin(x) * y[1] + u * u * t; };
  FdStateCoefficient c(2, fn, 1e-4);
  CoefPartials out(2);
  double y[2] = {0.4, -1.1};
  c.eval(0, 0.5, 0.4, y, 0.8, Order::second, out);
  CHECK(out.v == doctest::Approx(std::sin(0.4) * -1.1 + 0.32));
  CHECK(out.dx == doctest::Approx(std::cos(0.4) * -1.1).epsilon(1e-6));
  CHECK(out.du == doctest::Approx(0.8).epsilon(1e-6));
  CHECK(out.duu == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(out.dy[1] == doctest::Approx(std::sin(0.4)).epsilon(1e-6));
  CHECK(out.dxy[1] == doctest::Approx(std::cos(0.4)).epsilon(1e-5));
}

TEST_CASE("shapes and control profiles") {
  CHECK(shape_value(Shape::ramp, 0.25, 0.5) == doctest::Approx(0.5));
  CHECK(shape_value(Shape::sine, 0.25, 1.0) == doctest::Approx(1.0));
  CHECK(shape_value(Shape::half, 0.7, 1.0) == 0.0);
  for (int s = 0; s < kShapes; ++s) CHECK(shape_from_name(shape_name(Shape(s))) == Shape(s));
  CHECK_THROWS(shape_from_name("zigzag"));

  ControlProfile d = ControlProfile::direction(3, 1.0, 1, Shape::ramp, 2.0);
  CHECK(d.deterministic_part(1, 0.5) == doctest::Approx(1.0));
  CHECK(d.deterministic_part(0, 0.5) == 0.0);
  ControlProfile a = ControlProfile::zero(3, 1.0);
  a.coef(0, Shape::one) = 0.5;
  ControlProfile b = a + d * 0.5;
  CHECK(b.deterministic_part(0, 0.3) == doctest::Approx(0.5));
  CHECK(b.deterministic_part(1, 0.3) == doctest::Approx(0.3));
  CHECK((b - a).deterministic_part(1, 0.3) == doctest::Approx(0.3));
  CHECK_FALSE(b.noise_dependent());
}

TEST_CASE("noise increments have variance dt and truncation zeroes the tail") {
  GameWithLedger g = build_lq_game(LqParams::symmetric(2));
  TimeGrid grid(10, 1.0);
  NoiseBundle nb = make_noise(g.spec, grid, 3, 20000);
  double s2 = 0.0;
  for (int p = 0; p < nb.paths(); ++p) s2 += nb.dW(p, 4, 1) * nb.dW(p, 4, 1);
  s2 /= nb.paths();
  CHECK(s2 == doctest::Approx(grid.dt).epsilon(5.0 * std::sqrt(2.0 / nb.paths())));
  NoiseBundle tr = nb.truncated_after(6);
  CHECK(tr.dW(7, 5, 0) == nb.dW(7, 5, 0));
  CHECK(tr.dW(7, 6, 0) == 0.0);
  CHECK(tr.initial_normal(7, 1) == nb.initial_normal(7, 1));
  NoiseBundle again = make_noise(g.spec, grid, 3, 20000);
  CHECK(again.dW(123, 9, 1) == nb.dW(123, 9, 1));
  CHECK_THROWS_AS(make_noise(g.spec, TimeGrid(10, 2.0), 3, 100), std::invalid_argument);
}

}
