#include "ag/bsde/duality.hpp"

#include "ag/util/parallel.hpp"

namespace ag {

Estimate trace_duality_residual(int n_paths, const TimeGrid& grid, const MatrixProcess& P_like,
                                const MatrixProcess& Y_like) {
  std::vector<double> r(n_paths);
  const int M = grid.n_steps;
  for_blocks(n_paths, [&](int, int b, int e) {
    MatrixNode P, Y;
    for (int p = b; p < e; ++p) {
      double acc = 0.0;
      P_like(p, M, P);
      Y_like(p, M, Y);
      acc += (P.value * Y.value).trace();
      P_like(p, 0, P);
      Y_like(p, 0, Y);
      acc -= (P.value * Y.value).trace();
      for (int k = 0; k < M; ++k) {
        if (k > 0) {
          P_like(p, k, P);
          Y_like(p, k, Y);
        }
        double s = (P.drift * Y.value).trace() + (P.value * Y.drift).trace();
        for (size_t j = 0; j < P.diffusion.size() && j < Y.diffusion.size(); ++j)
          s += (P.diffusion[j] * Y.diffusion[j]).trace();
        acc -= s * grid.dt;
      }
      r[p] = acc;
    }
  });
  return mean_se(r);
}

}  // namespace ag
