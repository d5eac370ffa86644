// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/newton.hpp"
#include "indc/quadrature.hpp"
#include "indc/spp.hpp"
#include "indc/tableau.hpp"

#include <string>
#include <vector>

namespace indc {

/// Deferred-correction scheme: M uniform nodes per step and one tableau per
/// loop. methods[0] drives the prediction, methods[k] the k-th correction.
struct IndcScheme {
  int M = 1;
  std::vector<ButcherTableau> methods;
  NewtonOptions newton;

  int K() const { return static_cast<int>(methods.size()) - 1; }

  /// True when some loop uses a tableau that is not stiffly accurate or has
  /// a singular A. Such schemes are allowed; they are expected to diverge
  /// on stiff problems.
  bool warning() const;
};

/// Validates M and every tableau. Throws usage_error.
IndcScheme make_scheme(int M, std::vector<ButcherTableau> methods);

/// Same tableau in the prediction and all K corrections.
IndcScheme uniform_scheme(const ButcherTableau& t, int M, int K);

/// Node and stage values of one loop over one step.
///
/// Columns of y/z/f/g are nodes tau_0..tau_M; column 0 holds the step's
/// input. Y/Z hold the stage values, column m*s + i for stage i of substep m.
struct StepState {
  int loop = 0;
  Matrix y, z;
  Matrix f, g;  ///< f and g evaluated at the node values
  Matrix Y, Z;
  int newton_iterations = 0;
  double max_residual = 0.0;
};

/// Where a step sits in a solve, for error reporting.
struct StepContext {
  int step = 0;
};

/// Blow-up bound of the divergence monitor.
inline constexpr double divergence_bound = 1e8;

/// Loop 0: the base IRK stepped across the M substeps of [t_n, t_n + H].
StepState predict(const SppProblem& p, const IndcGrid& grid,
                  const ButcherTableau& t, const Vector& y_in,
                  const Vector& z_in, double t_n, double H,
                  const NewtonOptions& opts = {}, StepContext ctx = {});

/// Loop k >= 1 in updated-solution form: stages solve
///
///     Y_i     = y_m     + h Sc_i(f^) + h sum_j a_ij (f(Y_j,Z_j) - Pc_j(f^))
///     eps Z_i = eps z_m + h Sc_i(g^) + h sum_j a_ij (g(Y_j,Z_j) - Pc_j(g^))
///
/// where f^, g^ are the previous loop's values at the stencil nodes.
StepState correct(const SppProblem& p, const IndcGrid& grid,
                  const StageOperators& ops, const ButcherTableau& t,
                  const StepState& previous, const Vector& y_in,
                  const Vector& z_in, double t_n, double H,
                  const NewtonOptions& opts = {}, StepContext ctx = {});

/// Convenience overload building the stage operators on the fly.
StepState correct(const SppProblem& p, const IndcGrid& grid,
                  const ButcherTableau& t, const StepState& previous,
                  const Vector& y_in, const Vector& z_in, double t_n, double H,
                  const NewtonOptions& opts = {}, StepContext ctx = {});

/// One plain IRK step of size H (prediction with M = 1).
std::pair<Vector, Vector> irk_step(const SppProblem& p, const ButcherTableau& t,
                                   const Vector& y_in, const Vector& z_in,
                                   double t_n, double H,
                                   const NewtonOptions& opts = {});

/// One row of a solve trace.
struct TraceRow {
  int step;
  int node;
  int loop;
  double t;
  Vector y, z;
};

struct SolveOptions {
  bool record_trace = false;  ///< keep node values of every loop
};

struct SolveResult {
  std::vector<double> times;  ///< t_0 .. t_N
  std::vector<Vector> y, z;   ///< step outputs, index n for t_n
  std::vector<TraceRow> trace;
  int newton_iterations = 0;
  bool warning = false;

  const Vector& y_final() const { return y.back(); }
  const Vector& z_final() const { return z.back(); }
};

/// Prediction plus K corrections on each of n_steps steps, H = T / n_steps.
/// The step output is the loop-K value at tau_M. Throws step_error or
/// divergence_error tagged with the step index.
SolveResult solve(const SppProblem& p, const IndcScheme& scheme, double T,
                  int n_steps, const SolveOptions& opts = {});

}  // namespace indc
