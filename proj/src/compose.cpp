// SPDX-License-Identifier: Apache-2.0
#include "indc/compose.hpp"

#include "indc/errors.hpp"
#include "indc/quadrature.hpp"
#include "indc/solver.hpp"

#include <algorithm>

namespace indc {

ComposedTableau compose_indc_be(int M, int K) {
  if (K < 1) throw usage_error("compose: K must be >= 1, got " + std::to_string(K));
  const IndcGrid grid = build_grid(M);
  const double h = grid.h();

  Matrix T = Matrix::Zero(M, M);
  Matrix P(M, M);
  for (int i = 0; i < M; ++i) {
    P.row(i) = grid.basis_integral(0.0, (i + 1) * h).transpose();
    for (int j = 0; j <= i; ++j) {
      T(i, j) = h;
      P(i, j) -= h;
    }
  }

  const int s = M * (K + 1);
  ComposedTableau out;
  out.M = M;
  out.K = K;
  auto& t = out.tableau;
  t.name = "InDC-BE-" + std::to_string(M) + "-" + std::to_string(K) + "-composed";
  t.A = Matrix::Zero(s, s);
  t.c.resize(s);
  for (int k = 0; k <= K; ++k) {
    t.A.block(k * M, k * M, M, M) = T;
    if (k > 0) t.A.block(k * M, (k - 1) * M, M, M) = P;
    for (int i = 0; i < M; ++i) t.c(k * M + i) = (i + 1) * h;
  }
  t.b = t.A.row(s - 1).transpose();
  return out;
}

double step_equivalence(const SppProblem& p, int M, int K, double H) {
  const ComposedTableau composed = compose_indc_be(M, K);
  const auto [y1, z1] = irk_step(p, composed.tableau, p.y0, p.z0, p.t0, H);

  const SolveResult r = solve(p, uniform_scheme(builtin("BE"), M, K), H, 1);
  double dev = 0.0;
  if (p.dim_y > 0) dev = (r.y_final() - y1).lpNorm<Eigen::Infinity>();
  if (p.dim_z > 0) dev = std::max(dev, (r.z_final() - z1).lpNorm<Eigen::Infinity>());
  return dev;
}

}  // namespace indc
