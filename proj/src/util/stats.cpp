#include "ag/util/stats.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ag {

Estimate mean_se(const std::vector<double>& v) {
  Estimate e;
  if (v.empty()) return e;
  double s = 0.0;
  for (double x : v) s += x;
  double m = s / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  e.value = m;
  if (v.size() > 1) e.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return e;
}

void Moments::add(double x) {
  n += 1.0;
  double d = x - mean;
  mean += d / n;
  m2 += d * (x - mean);
}

void Moments::merge(const Moments& o) {
  if (o.n == 0.0) return;
  if (n == 0.0) {
    *this = o;
    return;
  }
  double tot = n + o.n;
  double d = o.mean - mean;
  mean += d * o.n / tot;
  m2 += o.m2 + d * d * n * o.n / tot;
  n = tot;
}

Estimate Moments::estimate() const {
  Estimate e;
  e.value = mean;
  if (n > 1.0) e.se = std::sqrt(m2 / (n - 1.0) / n);
  return e;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (a * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (b * 0xabc98388fb8fac03ULL));
  h = mix64(h ^ (c * 0x8cb92ba72f3d8dd7ULL));
  return h;
}

namespace {
inline double unit_open(std::uint64_t h) { return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53; }
}  // namespace

double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  // Box-Muller on the pair (2q, 2q+1); lane c picks cos or sin.
  std::uint64_t q = c >> 1;
  double u1 = unit_open(counter_hash(seed, a, b, 2 * q));
  double u2 = unit_open(counter_hash(seed, a, b, 2 * q + 1));
  double r = std::sqrt(-2.0 * std::log(u1));
  double ang = 2.0 * std::numbers::pi * u2;
  return (c & 1) ? r * std::sin(ang) : r * std::cos(ang);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("loglog_slope: need two or more points");
  double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < x.size(); ++k) {
    if (!(x[k] > 0) || !(y[k] > 0)) throw std::invalid_argument("loglog_slope: values must be positive");
    double lx = std::log(x[k]), ly = std::log(y[k]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ag
