#pragma once

#include "ag/bsde/backward.hpp"
#include "ag/model/game.hpp"

namespace ag {

// First adjoint of player i: dim N, y = P, z^j = Q^j.
struct AdjointSolution {
  int player = 0;
  BsdeSolution sol;
};

// Second adjoint of player i: dim N*N (row-major, symmetric).
struct SecondAdjointSolution {
  int player = 0;
  BsdeSolution sol;
};

AdjointSolution solve_first_adjoint(const GameSpec& spec, const PathEnsemble& ens, int i, const NoiseBundle& noise,
                                    const RegressionBasis& opts = {});

SecondAdjointSolution solve_second_adjoint(const GameSpec& spec, const PathEnsemble& ens, const AdjointSolution& first,
                                           const NoiseBundle& noise, const RegressionBasis& opts = {});

// Driver of the second adjoint at one node, exposed for tests.
void second_adjoint_driver(const GameSpec& spec, const NodePartials& np, const CostPartials& f, const double* P_next,
                           const double* Q, const double* Pm, const double* Qm, int drivers, double* out);

}  // namespace ag
