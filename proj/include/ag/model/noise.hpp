#pragma once

#include <cstdint>
#include <vector>

#include "ag/model/game.hpp"

namespace ag {

// Brownian increments dW[p][k][j] with N(0, dt) law, plus standard normals for
// initial states. Every draw is a pure function of (seed, path, step, driver),
// so two bundles with the same seed agree on shared coordinates.
class NoiseBundle {
 public:
  NoiseBundle() = default;
  NoiseBundle(std::uint64_t seed, int n_paths, const TimeGrid& grid, int drivers, int players);

  std::uint64_t seed() const { return seed_; }
  int paths() const { return n_paths_; }
  int drivers() const { return drivers_; }
  int players() const { return players_; }
  const TimeGrid& grid() const { return grid_; }

  const double* dW(int p, int k) const {
    return &dw_[(static_cast<size_t>(p) * grid_.n_steps + k) * drivers_];
  }
  double dW(int p, int k, int j) const { return dW(p, k)[j]; }
  double initial_normal(int p, int i) const { return z0_[static_cast<size_t>(p) * players_ + i]; }

  // Increments from step k on set to zero (used to check adaptedness).
  NoiseBundle truncated_after(int k) const;

 private:
  std::uint64_t seed_ = 0;
  int n_paths_ = 0, drivers_ = 0, players_ = 0;
  TimeGrid grid_;
  std::vector<double> dw_;
  std::vector<double> z0_;
};

NoiseBundle make_noise(const GameSpec& spec, const TimeGrid& grid, std::uint64_t seed, int n_paths);

}  // namespace ag
