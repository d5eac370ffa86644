// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/tableau.hpp"

#include <functional>

namespace indc {

struct NewtonOptions {
  double tol_abs = 1e-12;
  double tol_rel = 1e-10;
  int max_iter = 50;
};

struct NewtonResult {
  Vector x;
  int iterations = 0;       ///< linear solves performed
  int jacobian_updates = 0; ///< factorizations, including the initial one
  double residual = 0.0;    ///< final weighted residual norm
};

/// Simplified Newton for F(x) = 0.
///
/// The Jacobian is assembled once at `guess` and reused; it is re-assembled at
/// the current iterate when the residual contracts by less than a factor of
/// two. Convergence is declared when
///
///     || w .* F(x) ||_inf <= tol_abs + tol_rel * || x ||_inf,
///
/// with `weights` w (all ones when empty). Once accepted, up to three more
/// iterations are taken while the residual still contracts by 4x and sits
/// above 16 ulps of the iterate, so that iteration error stays below the
/// discretization errors being measured. Throws newton_error on a singular
/// Jacobian, a non-finite residual, or when max_iter is exhausted.
NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Matrix(const Vector&)>& jacobian,
                          Vector guess, const NewtonOptions& opts,
                          const Vector& weights = Vector());

}  // namespace indc
