#include "ag/model/validate.hpp"

#include <boost/random/sobol.hpp>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ag {

const ValidationEntry* ValidationReport::worst() const {
  const ValidationEntry* w = nullptr;
  for (const auto& e : entries)
    if (!w || e.worst_ratio > w->worst_ratio) w = &e;
  return w;
}

namespace {

struct Sampler {
  boost::random::sobol gen;
  explicit Sampler(int dim) : gen(static_cast<unsigned>(dim)) {}
  // the engine yields 64-bit integers; keep the top 53 bits
  double next(double lo, double hi) { return lo + (hi - lo) * std::ldexp(static_cast<double>(gen() >> 11), -53); }
};

double ratio(double observed, double allowed) {
  if (observed == 0.0) return 0.0;
  if (allowed <= 0.0) return std::numeric_limits<double>::infinity();
  return observed / allowed;
}

void require_finite(const CoefPartials& d, const char* name, int i, double t, double x) {
  bool ok = std::isfinite(d.v) && std::isfinite(d.dx) && std::isfinite(d.du) && std::isfinite(d.dxx) &&
            std::isfinite(d.dxu) && std::isfinite(d.duu) && d.dy.allFinite() && d.dxy.allFinite() &&
            d.duy.allFinite() && d.dyy.allFinite();
  if (!ok) {
    std::ostringstream os;
    os << name << " of player " << i << " is not finite at t=" << t << " x=" << x;
    throw std::runtime_error(os.str());
  }
}

}  // namespace

ValidationReport validate_game(const GameSpec& spec, const ConstantLedger& ledger, const SampleBox& box) {
  spec.check();
  const int n = spec.n_players;
  const double N = n;
  ValidationReport rep;

  struct Coef {
    const char* name;
    const StateCoefficient* c;
    double L, Ly;
  };
  Coef coefs[2] = {{"drift", spec.drift.get(), ledger.L_b, ledger.L_y_b},
                   {"diffusion", spec.diffusion.get(), ledger.L_sigma, ledger.L_y_sigma}};

  for (const Coef& cf : coefs) {
    for (int i = 0; i < n; ++i) {
      const char* tags[6] = {"growth", "first", "second_x", "dy", "cross_y", "dyy"};
      ValidationEntry ent[6];
      for (int k = 0; k < 6; ++k) {
        ent[k].tag = std::string(cf.name) + "." + tags[k];
        ent[k].player = i;
      }
      Sampler s(3 + n);
      CoefPartials d(n), d0(n);
      std::vector<double> y(n), zero(n, 0.0);
      for (int q = 0; q < box.points; ++q) {
        double t = s.next(0.0, spec.horizon);
        double u = s.next(-box.control, box.control);
        for (int a = 0; a < n; ++a) y[a] = s.next(-box.state, box.state);
        double x = y[i];
        std::vector<double> pt{t, x};
        pt.insert(pt.end(), y.begin(), y.end());
        pt.push_back(u);
        d.clear();
        cf.c->eval(i, t, x, y.data(), u, Order::second, d);
        require_finite(d, cf.name, i, t, x);
        d0.clear();
        cf.c->eval(i, t, 0.0, zero.data(), u, Order::value, d0);
        if (!std::isfinite(d0.v)) throw std::runtime_error(std::string(cf.name) + " not finite at zero state");

        double r[6] = {0, 0, 0, 0, 0, 0};
        r[0] = ratio(std::abs(d0.v), cf.L * (1.0 + std::abs(u)));
        r[1] = ratio(std::abs(d.dx) + std::abs(d.du) + std::abs(d.duu), cf.L);
        r[2] = ratio(std::abs(d.dxx) + std::abs(d.dxu), cf.L);
        for (int a = 0; a < n; ++a) {
          r[3] = std::max(r[3], ratio(std::abs(d.dy[a]), cf.Ly / N));
          r[4] = std::max(r[4], ratio(std::abs(d.dxy[a]) + std::abs(d.duy[a]), cf.Ly / N));
          for (int b = 0; b < n; ++b) {
            double lim = a == b ? cf.Ly / N : cf.Ly / (N * N);
            r[5] = std::max(r[5], ratio(std::abs(d.dyy(a, b)), lim));
          }
        }
        for (int k = 0; k < 6; ++k)
          if (r[k] > ent[k].worst_ratio || ent[k].point.empty()) {
            ent[k].worst_ratio = r[k];
            ent[k].point = pt;
          }
      }
      for (auto& e : ent) {
        if (e.worst_ratio > 1.0 + 1e-9) rep.passed = false;
        rep.entries.push_back(e);
      }
    }
  }

  // Costs only need bounded second partials on the box.
  Sampler s(1 + 2 * n);
  CostPartials c(n);
  std::vector<double> y(n), u(n);
  for (int q = 0; q < box.points; ++q) {
    double t = s.next(0.0, spec.horizon);
    for (int a = 0; a < n; ++a) y[a] = s.next(-box.state, box.state);
    for (int a = 0; a < n; ++a) u[a] = s.next(-box.control, box.control);
    for (int i = 0; i < n; ++i) {
      c.clear();
      spec.running->eval(i, t, y.data(), u.data(), Order::second, c);
      if (!c.dyy.allFinite() || !c.dyu.allFinite() || !c.duu.allFinite() || !std::isfinite(c.v))
        throw std::runtime_error("running cost of player " + std::to_string(i) + " is not finite");
      rep.max_cost_second = std::max({rep.max_cost_second, c.dyy.cwiseAbs().maxCoeff(), c.dyu.cwiseAbs().maxCoeff(),
                                      c.duu.cwiseAbs().maxCoeff()});
      c.clear();
      spec.terminal->eval(i, y.data(), Order::second, c);
      if (!c.dyy.allFinite() || !std::isfinite(c.v))
        throw std::runtime_error("terminal cost of player " + std::to_string(i) + " is not finite");
      rep.max_cost_second = std::max(rep.max_cost_second, c.dyy.cwiseAbs().maxCoeff());
    }
  }
  return rep;
}

namespace {

double rel_err(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

PartialCheck check_partials(const GameSpec& spec, const SampleBox& box, int points) {
  const int n = spec.n_players;
  PartialCheck out;
  auto note = [&](double e, const std::string& w) {
    if (e > out.worst_rel_error) {
      out.worst_rel_error = e;
      out.where = w;
    }
  };
  const double h = 1e-5;
  Sampler s(2 + 2 * n);
  CoefPartials d(n), dp(n), dm(n);
  CostPartials c(n), cp(n), cm(n);
  std::vector<double> y(n), u(n);
  for (int q = 0; q < points; ++q) {
    double t = s.next(0.0, spec.horizon);
    for (int a = 0; a < n; ++a) y[a] = s.next(-box.state, box.state);
    for (int a = 0; a < n; ++a) u[a] = s.next(-box.control, box.control);
    const StateCoefficient* cs[2] = {spec.drift.get(), spec.diffusion.get()};
    for (int w = 0; w < 2; ++w) {
      const StateCoefficient& C = *cs[w];
      std::string nm = w == 0 ? "drift" : "diffusion";
      for (int i = 0; i < n; ++i) {
        double x = y[i], ui = u[i];
        d.clear();
        C.eval(i, t, x, y.data(), ui, Order::second, d);
        note(rel_err(C.value(i, t, x, y.data(), ui), d.v), nm + ".v");
        // x and u directions
        auto fdx = [&](double dx, double du) { return C.value(i, t, x + dx, y.data(), ui + du); };
        note(rel_err((fdx(h, 0) - fdx(-h, 0)) / (2 * h), d.dx), nm + ".dx");
        note(rel_err((fdx(0, h) - fdx(0, -h)) / (2 * h), d.du), nm + ".du");
        dp.clear();
        dm.clear();
        C.eval(i, t, x + h, y.data(), ui, Order::first, dp);
        C.eval(i, t, x - h, y.data(), ui, Order::first, dm);
        note(rel_err((dp.dx - dm.dx) / (2 * h), d.dxx), nm + ".dxx");
        note(rel_err((dp.du - dm.du) / (2 * h), d.dxu), nm + ".dxu");
        for (int a = 0; a < n; ++a) note(rel_err((dp.dy[a] - dm.dy[a]) / (2 * h), d.dxy[a]), nm + ".dxy");
        dp.clear();
        dm.clear();
        C.eval(i, t, x, y.data(), ui + h, Order::first, dp);
        C.eval(i, t, x, y.data(), ui - h, Order::first, dm);
        note(rel_err((dp.du - dm.du) / (2 * h), d.duu), nm + ".duu");
        for (int a = 0; a < n; ++a) note(rel_err((dp.dy[a] - dm.dy[a]) / (2 * h), d.duy[a]), nm + ".duy");
        for (int a = 0; a < n; ++a) {
          std::vector<double> yp = y, ym = y;
          yp[a] += h;
          ym[a] -= h;
          note(rel_err((C.value(i, t, x, yp.data(), ui) - C.value(i, t, x, ym.data(), ui)) / (2 * h), d.dy[a]), nm + ".dy");
          dp.clear();
          dm.clear();
          C.eval(i, t, x, yp.data(), ui, Order::first, dp);
          C.eval(i, t, x, ym.data(), ui, Order::first, dm);
          for (int b = 0; b < n; ++b) note(rel_err((dp.dy[b] - dm.dy[b]) / (2 * h), d.dyy(a, b)), nm + ".dyy");
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      c.clear();
      spec.running->eval(i, t, y.data(), u.data(), Order::second, c);
      note(rel_err(spec.running->value(i, t, y.data(), u.data()), c.v), "running.v");
      for (int a = 0; a < 2 * n; ++a) {
        std::vector<double> yp = y, ym = y, up = u, um = u;
        if (a < n) {
          yp[a] += h;
          ym[a] -= h;
        } else {
          up[a - n] += h;
          um[a - n] -= h;
        }
        double fd = (spec.running->value(i, t, yp.data(), up.data()) - spec.running->value(i, t, ym.data(), um.data())) / (2 * h);
        note(rel_err(fd, a < n ? c.dy[a] : c.du[a - n]), "running.grad");
        cp.clear();
        cm.clear();
        spec.running->eval(i, t, yp.data(), up.data(), Order::first, cp);
        spec.running->eval(i, t, ym.data(), um.data(), Order::first, cm);
        for (int b = 0; b < n; ++b) {
          double fy = (cp.dy[b] - cm.dy[b]) / (2 * h);
          double fu = (cp.du[b] - cm.du[b]) / (2 * h);
          if (a < n) {
            note(rel_err(fy, c.dyy(a, b)), "running.dyy");
            note(rel_err(fu, c.dyu(a, b)), "running.dyu");
          } else {
            note(rel_err(fu, c.duu(a - n, b)), "running.duu");
          }
        }
      }
      c.clear();
      spec.terminal->eval(i, y.data(), Order::second, c);
      note(rel_err(spec.terminal->value(i, y.data()), c.v), "terminal.v");
      for (int a = 0; a < n; ++a) {
        std::vector<double> yp = y, ym = y;
        yp[a] += h;
        ym[a] -= h;
        note(rel_err((spec.terminal->value(i, yp.data()) - spec.terminal->value(i, ym.data())) / (2 * h), c.dy[a]), "terminal.dy");
        cp.clear();
        cm.clear();
        spec.terminal->eval(i, yp.data(), Order::first, cp);
        spec.terminal->eval(i, ym.data(), Order::first, cm);
        for (int b = 0; b < n; ++b) note(rel_err((cp.dy[b] - cm.dy[b]) / (2 * h), c.dyy(a, b)), "terminal.dyy");
      }
    }
  }
  return out;
}

}  // namespace ag
