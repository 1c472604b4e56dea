#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

namespace ag {

struct TimeGrid {
  int n_steps = 0;
  double horizon = 1.0;
  double dt = 0.0;

  TimeGrid() = default;
  TimeGrid(int steps, double T);
  double t(int k) const { return k == n_steps ? horizon : k * dt; }
  bool operator==(const TimeGrid& o) const { return n_steps == o.n_steps && horizon == o.horizon; }
};

enum class Order { value = 0, first = 1, second = 2 };

// Partials of a scalar coefficient phi(t, x, y, u) for one player, where x is
// the player's own state and y the full state vector. x and y are treated as
// separate arguments, the realized value uses y_i = x.
struct CoefPartials {
  double v = 0.0;
  double dx = 0.0, du = 0.0;
  double dxx = 0.0, dxu = 0.0, duu = 0.0;
  Eigen::VectorXd dy, dxy, duy;
  Eigen::MatrixXd dyy;

  explicit CoefPartials(int n = 0) { resize(n); }
  void resize(int n);
  void clear();
};

// Partials of a cost in (y, u), y and u full vectors.
struct CostPartials {
  double v = 0.0;
  Eigen::VectorXd dy, du;
  Eigen::MatrixXd dyy, dyu, duu;  // dyu(k, m) = d2 / dy_k du_m

  explicit CostPartials(int n = 0) { resize(n); }
  void resize(int n);
  void clear();
};

class StateCoefficient {
 public:
  virtual ~StateCoefficient() = default;
  virtual double value(int i, double t, double x, const double* y, double u) const = 0;
  // Fills partials up to the requested order. Higher entries are not touched.
  virtual void eval(int i, double t, double x, const double* y, double u, Order order, CoefPartials& out) const = 0;
  // Realized values for all players at once (x_i = y_i).
  virtual void values(int n, double t, const double* y, const double* u, double* out) const {
    for (int i = 0; i < n; ++i) out[i] = value(i, t, y[i], y, u[i]);
  }
  // False when every second partial vanishes identically.
  virtual bool curved() const { return true; }
};

class RunningCost {
 public:
  virtual ~RunningCost() = default;
  virtual double value(int i, double t, const double* y, const double* u) const = 0;
  // Entries the cost does not depend on are left as they are; callers clear.
  virtual void eval(int i, double t, const double* y, const double* u, Order order, CostPartials& out) const = 0;
  virtual void values(int n, double t, const double* y, const double* u, double* out) const {
    for (int i = 0; i < n; ++i) out[i] = value(i, t, y, u);
  }
};

class TerminalCost {
 public:
  virtual ~TerminalCost() = default;
  virtual double value(int i, const double* y) const = 0;
  // Uses v, dy, dyy of out.
  virtual void eval(int i, const double* y, Order order, CostPartials& out) const = 0;
  virtual void values(int n, const double* y, double* out) const {
    for (int i = 0; i < n; ++i) out[i] = value(i, y);
  }
};

struct InitialLaw {
  Eigen::VectorXd mean, stdev;
  double sample(int i, double z) const { return mean[i] + stdev[i] * z; }
};

struct GameSpec {
  std::string name;
  int n_players = 0;
  double horizon = 1.0;
  InitialLaw initial;
  std::shared_ptr<const StateCoefficient> drift, diffusion;
  std::shared_ptr<const RunningCost> running;
  std::shared_ptr<const TerminalCost> terminal;
  // Adds a common Brownian motion with unit loading to every player.
  bool common_noise = false;

  int drivers() const { return n_players + (common_noise ? 1 : 0); }
  bool curved() const;
  // Throws std::invalid_argument on structural problems.
  void check() const;
};

// Sup-norms for the cost gap of an ordered pair (i, j):
// Df = f_i - f_j, Dg = g_i - g_j. Matrices are N x N over (y_a, y_b),
// (y_a, u_b), (u_a, u_b); base vectors are gradients at zero state/control.
struct CostGapNorms {
  Eigen::MatrixXd fxx, fxu, fuu, gxx;
  Eigen::VectorXd fx0, gx0;
  void resize(int n);
};

struct ConstantLedger {
  int n_players = 0;
  double L_b = 0.0, L_y_b = 0.0, L_sigma = 0.0, L_y_sigma = 0.0;
  double L_y_bsigma = 0.0;  // L_y_b + 3 L_y_sigma^2
  bool sampled = false;     // gap norms taken from a sampled box
  std::vector<CostGapNorms> gaps;  // index i * N + j

  void refresh() { L_y_bsigma = L_y_b + 3.0 * L_y_sigma * L_y_sigma; }
  const CostGapNorms& gap(int i, int j) const { return gaps.at(static_cast<size_t>(i) * n_players + j); }
  CostGapNorms& gap(int i, int j) { return gaps.at(static_cast<size_t>(i) * n_players + j); }
};

// Box used for sampled checks and sampled sup-norms.
struct SampleBox {
  double state = 3.0;
  double control = 2.0;
  int points = 4096;
};

struct GameWithLedger {
  GameSpec spec;
  ConstantLedger ledger;
  SampleBox box;  // region where the ledger is claimed to hold
};


// Fills gap norms by Sobol sampling of the cost Hessians over the box.
void sample_gap_norms(const GameSpec& spec, const SampleBox& box, ConstantLedger& ledger);

}  // namespace ag
