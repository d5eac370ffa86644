// SPDX-License-Identifier: Apache-2.0
#include "indc/quadrature.hpp"

#include "indc/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

namespace indc {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussRule gauss_legendre_unit(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    rule.nodes[i] = 0.5 * (1.0 - x);
    rule.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

IndcGrid build_grid(int M, bool include_left) {
  if (M < 1 || M > 12)
    throw usage_error("M must lie in [1, 12], got " + std::to_string(M));
  IndcGrid g;
  g.M_ = M;
  g.include_left_ = include_left;
  for (int m = include_left ? 0 : 1; m <= M; ++m)
    g.stencil_.push_back(static_cast<double>(m) / M);

  const int n = g.stencil_size();
  g.bary_.assign(n, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      if (k != j) g.bary_[j] /= (g.stencil_[j] - g.stencil_[k]);
    }
  }
  // Basis has degree n-1; a rule with ceil((n+1)/2) points is exact for it.
  g.rule_ = gauss_legendre_unit((n + 2) / 2);

  g.S_.resize(M, n);
  for (int m = 0; m < M; ++m) {
    g.S_.row(m) = g.basis_integral(static_cast<double>(m) / M,
                                   static_cast<double>(m + 1) / M)
                      .transpose() * M;
  }
  return g;
}

Vector IndcGrid::basis(double x) const {
  const int n = stencil_size();
  Vector out = Vector::Zero(n);
  for (int k = 0; k < n; ++k) {
    if (x == stencil_[k]) {
      out(k) = 1.0;
      return out;
    }
  }
  double denom = 0.0;
  for (int k = 0; k < n; ++k) {
    out(k) = bary_[k] / (x - stencil_[k]);
    denom += out(k);
  }
  return out / denom;
}

Vector IndcGrid::basis_integral(double a, double b) const {
  Vector out = Vector::Zero(stencil_size());
  if (a == b) return out;
  const double half = b - a;
  for (std::size_t q = 0; q < rule_.nodes.size(); ++q) {
    out += rule_.weights[q] * half * basis(a + half * rule_.nodes[q]);
  }
  return out;
}

namespace {

void check_indices(const IndcGrid& grid, const ButcherTableau& t, int m, int i) {
  if (m < 0 || m >= grid.M())
    throw usage_error("substep index " + std::to_string(m) + " outside [0, " +
                      std::to_string(grid.M()) + ")");
  if (i < 0 || i >= t.stages())
    throw usage_error("stage index " + std::to_string(i) + " outside [0, " +
                      std::to_string(t.stages()) + ")");
}

}  // namespace

Vector integration_row(const IndcGrid& grid, const ButcherTableau& t, int m,
                       int i) {
  check_indices(grid, t, m, i);
  const double M = grid.M();
  return grid.basis_integral(m / M, (m + t.c(i)) / M) * M;
}

Vector interpolation_row(const IndcGrid& grid, const ButcherTableau& t, int m,
                         int i) {
  check_indices(grid, t, m, i);
  return grid.basis((m + t.c(i)) / grid.M());
}

StageOperators stage_operators(const IndcGrid& grid, const ButcherTableau& t) {
  const int s = t.stages();
  StageOperators ops;
  ops.stages = s;
  ops.Sc.resize(s * grid.M(), grid.stencil_size());
  ops.Pc.resize(s * grid.M(), grid.stencil_size());
  for (int m = 0; m < grid.M(); ++m) {
    for (int i = 0; i < s; ++i) {
      ops.Sc.row(m * s + i) = integration_row(grid, t, m, i).transpose();
      ops.Pc.row(m * s + i) = interpolation_row(grid, t, m, i).transpose();
    }
  }
  return ops;
}

}  // namespace indc
