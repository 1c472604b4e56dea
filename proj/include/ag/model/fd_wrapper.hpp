#pragma once

#include <functional>

#include "ag/model/game.hpp"

namespace ag {

// Value-only evaluators with partials from central differences. Meant for
// prototyping new games; the preset games supply analytic partials.
using CoefFn = std::function<double(int i, double t, double x, const double* y, double u)>;
using RunningFn = std::function<double(int i, double t, const double* y, const double* u)>;
using TerminalFn = std::function<double(int i, const double* y)>;

class FdStateCoefficient : public StateCoefficient {
 public:
  FdStateCoefficient(int n_players, CoefFn fn, double step = 1e-4) : n_(n_players), fn_(std::move(fn)), h_(step) {}
  double value(int i, double t, double x, const double* y, double u) const override { return fn_(i, t, x, y, u); }
  void eval(int i, double t, double x, const double* y, double u, Order order, CoefPartials& out) const override;

 private:
  int n_;
  CoefFn fn_;
  double h_;
};

class FdRunningCost : public RunningCost {
 public:
  FdRunningCost(int n_players, RunningFn fn, double step = 1e-4) : n_(n_players), fn_(std::move(fn)), h_(step) {}
  double value(int i, double t, const double* y, const double* u) const override { return fn_(i, t, y, u); }
  void eval(int i, double t, const double* y, const double* u, Order order, CostPartials& out) const override;

 private:
  int n_;
  RunningFn fn_;
  double h_;
};

class FdTerminalCost : public TerminalCost {
 public:
  FdTerminalCost(int n_players, TerminalFn fn, double step = 1e-4) : n_(n_players), fn_(std::move(fn)), h_(step) {}
  double value(int i, const double* y) const override { return fn_(i, y); }
  void eval(int i, const double* y, Order order, CostPartials& out) const override;

 private:
  int n_;
  TerminalFn fn_;
  double h_;
};

}  // namespace ag
