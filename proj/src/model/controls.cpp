#include "ag/model/controls.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ag {

double shape_value(Shape s, double t, double T) {
  double r = t / T;
  switch (s) {
    case Shape::one: return 1.0;
    case Shape::ramp: return r;
    case Shape::sine: return std::sin(2.0 * std::numbers::pi * r);
    case Shape::cosine: return std::cos(2.0 * std::numbers::pi * r);
    case Shape::half: return t <= 0.5 * T + 1e-12 * T ? 1.0 : 0.0;
    case Shape::square: return r * r;
  }
  return 0.0;
}

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::one: return "one";
    case Shape::ramp: return "ramp";
    case Shape::sine: return "sine";
    case Shape::half: return "half";
    case Shape::cosine: return "cosine";
    case Shape::square: return "square";
  }
  return "?";
}

Shape shape_from_name(const std::string& s) {
  for (int k = 0; k < kShapes; ++k)
    if (shape_name(static_cast<Shape>(k)) == s) return static_cast<Shape>(k);
  throw std::invalid_argument("unknown control shape '" + s + "'");
}

const std::vector<Shape>& direction_dictionary() {
  static const std::vector<Shape> d{Shape::one, Shape::ramp, Shape::sine, Shape::half};
  return d;
}

ControlProfile::ControlProfile(int n_players, double horizon, int drivers)
    : n_(n_players), T_(horizon), coef_(Eigen::MatrixXd::Zero(n_players, kShapes)),
      load_(Eigen::MatrixXd::Zero(n_players, drivers)) {
  if (n_players < 1) throw std::invalid_argument("control profile needs players");
}

ControlProfile ControlProfile::zero(int n_players, double horizon, int drivers) {
  return ControlProfile(n_players, horizon, drivers);
}

ControlProfile ControlProfile::direction(int n_players, double horizon, int h, Shape s, double a) {
  if (h < 0 || h >= n_players) throw std::invalid_argument("direction player out of range");
  ControlProfile c(n_players, horizon);
  c.coef(h, s) = a;
  return c;
}

bool ControlProfile::noise_dependent() const { return load_.size() > 0 && load_.cwiseAbs().maxCoeff() > 0.0; }

void ControlProfile::set_loading(int i, int j, double v) {
  if (j >= load_.cols()) {
    Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n_, j + 1);
    l.leftCols(load_.cols()) = load_;
    load_ = l;
  }
  load_(i, j) = v;
}

double ControlProfile::deterministic_part(int i, double t) const {
  double v = 0.0;
  for (int s = 0; s < kShapes; ++s) {
    double c = coef_(i, s);
    if (c != 0.0) v += c * shape_value(static_cast<Shape>(s), t, T_);
  }
  return v;
}

double ControlProfile::value(int i, double t, const double* w) const {
  double v = deterministic_part(i, t);
  if (w)
    for (int j = 0; j < load_.cols(); ++j) v += load_(i, j) * w[j];
  return v;
}

std::vector<double> ControlProfile::table(const TimeGrid& grid) const {
  std::vector<double> out(static_cast<size_t>(grid.n_steps + 1) * n_);
  for (int k = 0; k <= grid.n_steps; ++k)
    for (int i = 0; i < n_; ++i) out[static_cast<size_t>(k) * n_ + i] = deterministic_part(i, grid.t(k));
  return out;
}

ControlProfile& ControlProfile::operator+=(const ControlProfile& o) {
  if (o.n_ != n_) throw std::invalid_argument("control profiles differ in player count");
  coef_ += o.coef_;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < o.load_.cols(); ++j)
      if (o.load_(i, j) != 0.0) set_loading(i, j, loading(i, j) + o.load_(i, j));
  return *this;
}

ControlProfile ControlProfile::operator+(const ControlProfile& o) const {
  ControlProfile r = *this;
  r += o;
  return r;
}

ControlProfile ControlProfile::operator*(double a) const {
  ControlProfile r = *this;
  r.coef_ *= a;
  r.load_ *= a;
  return r;
}

ControlProfile ControlProfile::operator-(const ControlProfile& o) const { return *this + o * -1.0; }

}  // namespace ag
