// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/spp.hpp"
#include "indc/tableau.hpp"

namespace indc {

/// InDC-BE with M nodes and K corrections written as one IRK method with
/// s = M (K + 1) stages. Stage block k holds the node values of loop k.
struct ComposedTableau {
  ButcherTableau tableau;
  int M = 0;
  int K = 0;
  /// First stage index of loop k's block.
  int block_start(int k) const { return k * M; }
};

/// Block lower-bidiagonal tableau. With h = 1/M and S~_ij the integral of the
/// j-th Lagrange basis over [0, i/M]:
///
///     A = [ T          ]     T_ij = h for j <= i
///         [ P  T       ]     P_ij = S~_ij - h for j <= i, S~_ij otherwise
///         [    P  T    ]
///         [       P  T ]
///
/// b is the last row of A and c repeats (1..M)/M in every block. Requires
/// M in [1, 12] and K >= 1; throws usage_error otherwise.
ComposedTableau compose_indc_be(int M, int K);

/// Max-norm difference between one step of the composed tableau run as a
/// plain IRK and one step of the loop solver with BE:M,K, both from the
/// problem's initial data at t0 with step size H.
double step_equivalence(const SppProblem& p, int M, int K, double H);

}  // namespace indc
