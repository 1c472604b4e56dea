#pragma once

#include <cstdint>
#include <vector>

namespace ag {

struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

// Sample mean and standard error of the mean, summed in index order.
Estimate mean_se(const std::vector<double>& v);

// Streaming moments, merged in a fixed order for reproducible reductions.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  void add(double x);
  void merge(const Moments& o);
  Estimate estimate() const;
};

// Counter-based generator: the draw depends only on its coordinates.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);
double counter_normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c);

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ag
