// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/tableau.hpp"

#include <vector>

namespace indc {

/// Gauss-Legendre nodes and weights on [0, 1], exact for degree 2n-1.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre_unit(int n);

/// Uniform deferred-correction grid on one step, normalized to [0, 1].
///
/// Nodes are tau_m = m/M. The interpolation stencil is tau_1..tau_M (the step
/// start is excluded), so alpha_k is the Lagrange basis of degree M-1. The
/// `include_left` variant adds tau_0 to the stencil; it exists only for the
/// stability diagnostic and is not used by the solver.
///
/// S(m, k) = (1/h) * integral of alpha_k over [tau_m, tau_{m+1}], h = 1/M.
class IndcGrid {
 public:
  int M() const { return M_; }
  bool include_left() const { return include_left_; }
  double h() const { return 1.0 / M_; }

  /// Stencil abscissae in [0, 1]; length M (or M+1 with the left node).
  const std::vector<double>& stencil() const { return stencil_; }
  int stencil_size() const { return static_cast<int>(stencil_.size()); }

  /// Column index of node tau_m (m = 1..M, or 0..M with the left node).
  int column_of_node(int m) const { return include_left_ ? m : m - 1; }

  /// M x stencil_size integration matrix.
  const Matrix& S() const { return S_; }

  /// Lagrange basis values alpha_k(x), barycentric form.
  Vector basis(double x) const;

  /// Integrals of alpha_k over [a, b] by a Gauss rule exact for the basis.
  Vector basis_integral(double a, double b) const;

  friend IndcGrid build_grid(int M, bool include_left);

 private:
  int M_ = 0;
  bool include_left_ = false;
  std::vector<double> stencil_;
  std::vector<double> bary_;
  GaussRule rule_;
  Matrix S_;
};

/// 1 <= M <= 12, otherwise usage_error.
IndcGrid build_grid(int M, bool include_left = false);

/// Row mapping stencil samples to (1/h) * integral over
/// [tau_m, tau_m + c_i h]. m in [0, M), i in [0, s).
Vector integration_row(const IndcGrid& grid, const ButcherTableau& t, int m,
                       int i);

/// Row mapping stencil samples to the interpolant at tau_m + c_i h.
Vector interpolation_row(const IndcGrid& grid, const ButcherTableau& t, int m,
                         int i);

/// All internal-stage rows for one tableau, row index m*s + i.
struct StageOperators {
  int stages = 0;
  Matrix Sc;  ///< (s*M) x stencil_size
  Matrix Pc;  ///< (s*M) x stencil_size
};
StageOperators stage_operators(const IndcGrid& grid, const ButcherTableau& t);

}  // namespace indc
