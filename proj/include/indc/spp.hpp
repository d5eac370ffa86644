// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/tableau.hpp"

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace indc {

/// Partial derivatives of f and g with respect to y and z.
struct JacobianBlocks {
  Matrix fy, fz, gy, gz;
};

/// Singularly perturbed system
///
///     y' = f(y, z, t),   eps z' = g(y, z, t).
///
/// Either dimension may be zero. Autonomous problems ignore t.
struct SppProblem {
  using Rhs = std::function<Vector(const Vector& y, const Vector& z, double t)>;
  using Jac = std::function<JacobianBlocks(const Vector& y, const Vector& z, double t)>;
  using Exact = std::function<std::pair<Vector, Vector>(double t)>;

  std::string name;
  int dim_y = 0;
  int dim_z = 0;
  double eps = 1.0;
  Rhs f;
  Rhs g;
  Jac jacobian;
  Vector y0;
  Vector z0;
  double t0 = 0.0;
  Exact exact;  ///< empty when no closed form is known
};

/// eps z' = -z + cos t with the smooth-manifold start z(0) = 1/(1+eps^2).
/// dim_y = 0. Exact solution (cos t + eps sin t)/(1+eps^2) + C exp(-t/eps)
/// with C fixed by z0 (zero for the default start).
SppProblem scalar_linear(double eps);

/// y' = z, eps z' = (1 - y^2) z - y, y(0) = 2 and the well-prepared
/// z(0) = -2/3 + (10/81) eps - (292/2187) eps^2.
SppProblem van_der_pol(double eps);

/// y' = 0, eps z' = -z, y0 = 0, z0 = 1. Linear decay onto z = 0.
SppProblem linear_decay(double eps);

/// Non-stiff y' = lambda y, y(0) = 1 (dim_z = 0).
SppProblem dahlquist(double lambda);

/// y' = lambda y for complex lambda = re + i im, written as a real 2x2
/// system in (Re y, Im y), y(0) = (1, 0). dim_z = 0.
SppProblem complex_dahlquist(double re, double im);

/// Registry used by the CLI: scalar, vdp, decay, dahlquist (lambda = -1).
SppProblem problem_by_name(std::string_view name, double eps);
const std::vector<std::string>& problem_names();

/// Largest relative deviation of the analytic Jacobian blocks from central
/// finite differences (step 1e-6 scaled by max(1, |x_j|)).
double jacobian_fd_deviation(const SppProblem& p, const Vector& y,
                             const Vector& z, double t);

/// Options for the reduced-system resolvent z = G(y).
struct ResolventOptions {
  double tol = 1e-12;
  int max_iter = 50;
};

/// Solves g(y, z, t) = 0 for z by damped Newton starting from `guess`
/// (problem z0 when absent). Throws newton_error with the final residual on
/// non-convergence or singular g_z.
Vector reduced_resolvent(const SppProblem& p, const Vector& y, double t = 0.0,
                         std::optional<Vector> guess = std::nullopt,
                         const ResolventOptions& opts = {});

}  // namespace indc
