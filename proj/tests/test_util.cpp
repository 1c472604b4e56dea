#include "doctest.h"

#include <atomic>
#include <cmath>
#include <vector>

#include "ag/util/parallel.hpp"
#include "ag/util/stats.hpp"

using namespace ag;

TEST_SUITE("util") {

TEST_CASE("counter_normal is a pure function of its counters") {
  CHECK(counter_normal(7, 1, 2, 3) == counter_normal(7, 1, 2, 3));
  CHECK(counter_normal(7, 1, 2, 3) != counter_normal(7, 1, 2, 4));
  CHECK(counter_normal(7, 1, 2, 3) != counter_normal(8, 1, 2, 3));
  CHECK(counter_hash(1, 2, 3, 4) != counter_hash(1, 3, 2, 4));
}

TEST_CASE("counter_normal has standard normal moments") {
  const int n = 200000;
  double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
  int tail = 0;
  for (int k = 0; k < n; ++k) {
    double z = counter_normal(42, 0, k, 0);
    m1 += z, m2 += z * z, m3 += z * z * z, m4 += z * z * z * z;
    tail += std::abs(z) > 1.959963985;
  }
  m1 /= n, m2 /= n, m3 /= n, m4 /= n;
  CHECK(std::abs(m1) < 5.0 / std::sqrt(n));
  CHECK(std::abs(m2 - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(m3) < 5.0 * std::sqrt(15.0 / n));
  CHECK(std::abs(m4 - 3.0) < 5.0 * std::sqrt(96.0 / n));
  CHECK(std::abs(tail / double(n) - 0.05) < 5.0 * std::sqrt(0.05 * 0.95 / n));
}

TEST_CASE("mean_se against hand values") {
  Estimate e = mean_se({1.0, 2.0, 3.0, 4.0});
  CHECK(e.value == doctest::Approx(2.5));
  // sample variance 5/3, se = sqrt(5/3 / 4)
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(mean_se({3.0}).se == 0.0);
}

TEST_CASE("Moments merge equals one pass") {
  std::vector<double> v;
  for (int k = 0; k < 1000; ++k) v.push_back(std::sin(k * 0.37) + 0.01 * k);
  Moments all, a, b;
  for (size_t k = 0; k < v.size(); ++k) {
    all.add(v[k]);
    (k < 313 ? a : b).add(v[k]);
  }
  a.merge(b);
  CHECK(a.estimate().value == doctest::Approx(all.estimate().value).epsilon(1e-13));
  CHECK(a.estimate().se == doctest::Approx(all.estimate().se).epsilon(1e-12));
  CHECK(a.estimate().value == doctest::Approx(mean_se(v).value).epsilon(1e-13));
  CHECK(a.estimate().se == doctest::Approx(mean_se(v).se).epsilon(1e-12));
}

TEST_CASE("loglog_slope recovers a power law") {
  std::vector<double> x{2, 4, 8, 16}, y;
  for (double n : x) y.push_back(3.0 * std::pow(n, -0.75));
  CHECK(loglog_slope(x, y) == doctest::Approx(-0.75));
}

TEST_CASE("for_blocks covers every path once with fixed block bounds") {
  const int before = thread_count();
  for (int threads : {1, 2, 3}) {
    set_thread_count(threads);
    const int n = 3 * kBlockPaths + 17;
    std::vector<int> hits(n, 0), block_of(n, -1);
    for_blocks(n, [&](int blk, int b, int e) {
      CHECK(b == blk * kBlockPaths);
      for (int p = b; p < e; ++p) hits[p]++, block_of[p] = blk;
    });
    for (int p = 0; p < n; ++p) {
      CHECK(hits[p] == 1);
      CHECK(block_of[p] == p / kBlockPaths);
    }
    CHECK(block_count(n) == 4);
    std::atomic<int> items{0};
    for_items(11, [&](int) { items++; });
    CHECK(items == 11);
  }
  CHECK_THROWS_AS(set_thread_count(0), std::invalid_argument);
  set_thread_count(before);
}

}
