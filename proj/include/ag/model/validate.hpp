#pragma once

#include <string>
#include <vector>

#include "ag/model/game.hpp"

namespace ag {

struct ValidationEntry {
  std::string tag;     // which bound, e.g. "drift.dy"
  int player = 0;
  double worst_ratio = 0.0;  // observed / allowed, <= 1 passes
  std::vector<double> point;  // (t, x, y..., u)
};

struct ValidationReport {
  bool passed = true;
  std::vector<ValidationEntry> entries;
  double max_cost_second = 0.0;  // largest |cost second partial| seen
  const ValidationEntry* worst() const;
};

// Samples the box and compares the partials of drift and diffusion against
// the ledger's growth and coupling bounds. Throws std::runtime_error when an
// evaluator returns a non-finite value.
ValidationReport validate_game(const GameSpec& spec, const ConstantLedger& ledger, const SampleBox& box = {});

struct PartialCheck {
  double worst_rel_error = 0.0;
  std::string where;
};

// Compares supplied partials with central differences of the values.
PartialCheck check_partials(const GameSpec& spec, const SampleBox& box = {}, int points = 256);

}  // namespace ag
