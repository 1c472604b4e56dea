#include "ag/model/noise.hpp"

#include <cmath>
#include <stdexcept>

#include "ag/util/parallel.hpp"
#include "ag/util/stats.hpp"

namespace ag {

namespace {
// Step coordinate reserved for initial-state normals.
constexpr std::uint64_t kInitialStream = 0xffffffffULL;
}

NoiseBundle::NoiseBundle(std::uint64_t seed, int n_paths, const TimeGrid& grid, int drivers, int players)
    : seed_(seed), n_paths_(n_paths), drivers_(drivers), players_(players), grid_(grid) {
  if (n_paths < 2) throw std::invalid_argument("need at least two paths");
  if (drivers < 1 || players < 1) throw std::invalid_argument("noise needs drivers and players");
  dw_.resize(static_cast<size_t>(n_paths) * grid.n_steps * drivers);
  z0_.resize(static_cast<size_t>(n_paths) * players);
  const double sq = std::sqrt(grid.dt);
  for_blocks(n_paths, [&](int, int b, int e) {
    for (int p = b; p < e; ++p) {
      for (int k = 0; k < grid_.n_steps; ++k)
        for (int j = 0; j < drivers_; ++j)
          dw_[(static_cast<size_t>(p) * grid_.n_steps + k) * drivers_ + j] = sq * counter_normal(seed_, p, k, j);
      for (int i = 0; i < players_; ++i)
        z0_[static_cast<size_t>(p) * players_ + i] = counter_normal(seed_, p, kInitialStream, i);
    }
  });
}

NoiseBundle NoiseBundle::truncated_after(int k) const {
  NoiseBundle r = *this;
  for (int p = 0; p < n_paths_; ++p)
    for (int s = k; s < grid_.n_steps; ++s)
      for (int j = 0; j < drivers_; ++j) r.dw_[(static_cast<size_t>(p) * grid_.n_steps + s) * drivers_ + j] = 0.0;
  return r;
}

NoiseBundle make_noise(const GameSpec& spec, const TimeGrid& grid, std::uint64_t seed, int n_paths) {
  if (std::abs(grid.horizon - spec.horizon) > 1e-12 * spec.horizon)
    throw std::invalid_argument("grid horizon does not match game horizon");
  return NoiseBundle(seed, n_paths, grid, spec.drivers(), spec.n_players);
}

}  // namespace ag
