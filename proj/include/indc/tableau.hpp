// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace indc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Butcher tableau of an s-stage implicit Runge-Kutta method.
///
/// `order` and `stage_order` are metadata copied from the method's published
/// description; they are never recomputed from order conditions. Composed
/// tableaus leave them unset.
struct ButcherTableau {
  std::string name;
  Matrix A;
  Vector b;
  Vector c;
  std::optional<int> order;
  std::optional<int> stage_order;

  int stages() const { return static_cast<int>(b.size()); }
};

/// Names accepted by builtin(), canonical spelling.
const std::vector<std::string>& builtin_names();

/// One of BE, DIRK2-SA, DIRK2-NSA, LobattoIIIA2, RadauIIA3. Short aliases
/// (Radau3, DIRK2SA, Lobatto2, trapezoidal, midpoint, ...) are accepted and
/// matching ignores case, '-' and '_'. Throws usage_error listing the known
/// names otherwise.
ButcherTableau builtin(std::string_view name);

/// Compact token used by scheme specs ("BE", "DIRK2SA", "Radau3", ...). Falls
/// back to the tableau name for non-builtin tableaus.
std::string short_token(const ButcherTableau& t);

/// Checks s >= 1, matching dimensions, finite entries and c_i = sum_j a_ij
/// (to `tol`). Throws usage_error with the offending field.
void validate(const ButcherTableau& t, double tol = 1e-13);

/// b^T == e_s^T A entrywise within 1e-14.
bool is_stiffly_accurate(const ButcherTableau& t);

/// LU with partial pivoting succeeds and the estimated condition number of A
/// stays below 1e12.
bool has_invertible_A(const ButcherTableau& t);

/// R(z) = 1 + z b^T (I - zA)^{-1} 1. For stiffly accurate methods this is
/// the same rational function as e_s^T (I - zA)^{-1} 1. Throws pole_error if
/// I - zA is numerically singular.
std::complex<double> stability_function(const ButcherTableau& t,
                                        std::complex<double> z);

/// JSON object with fields name, s, A (row-major nested arrays), b, c, p, q.
/// Numbers are written with 17 significant digits; unset p/q become null.
std::string to_json(const ButcherTableau& t);
ButcherTableau tableau_from_json(std::string_view text);

/// Human-readable Butcher array.
std::string to_text(const ButcherTableau& t);

}  // namespace indc
