#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ag/model/game.hpp"

namespace ag {

enum class Shape { one = 0, ramp, sine, half, cosine, square };
constexpr int kShapes = 6;

double shape_value(Shape s, double t, double T);
std::string shape_name(Shape s);
Shape shape_from_name(const std::string& s);

// Direction shapes used for derivative checks and asymmetry maxima.
const std::vector<Shape>& direction_dictionary();

// Per-player open-loop control: a combination of time shapes plus an optional
// linear loading on the Brownian levels W_t (adapted, not Markov).
class ControlProfile {
 public:
  ControlProfile() = default;
  ControlProfile(int n_players, double horizon, int drivers = 0);

  static ControlProfile zero(int n_players, double horizon, int drivers = 0);
  // Only player h moves, along shape s with amplitude a.
  static ControlProfile direction(int n_players, double horizon, int h, Shape s, double a = 1.0);

  int players() const { return n_; }
  double horizon() const { return T_; }
  int drivers() const { return static_cast<int>(load_.cols()); }
  bool noise_dependent() const;

  double& coef(int i, Shape s) { return coef_(i, static_cast<int>(s)); }
  double coef(int i, Shape s) const { return coef_(i, static_cast<int>(s)); }
  // Loading of player i on driver j; grows the loading table if needed.
  void set_loading(int i, int j, double v);
  double loading(int i, int j) const { return j < load_.cols() ? load_(i, j) : 0.0; }

  double deterministic_part(int i, double t) const;
  double value(int i, double t, const double* w) const;

  // Deterministic values on the grid, [k][i].
  std::vector<double> table(const TimeGrid& grid) const;

  ControlProfile& operator+=(const ControlProfile& o);
  ControlProfile operator+(const ControlProfile& o) const;
  ControlProfile operator-(const ControlProfile& o) const;
  ControlProfile operator*(double a) const;

 private:
  int n_ = 0;
  double T_ = 1.0;
  Eigen::MatrixXd coef_;  // n x kShapes
  Eigen::MatrixXd load_;  // n x drivers
};

}  // namespace ag
