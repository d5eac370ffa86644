// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/errors.hpp"
#include "indc/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace indc {

/// Reference solution could not be trusted (self-consistency failed).
class harness_error : public numerical_error {
 public:
  using numerical_error::numerical_error;
};

struct ErrorRow {
  double H = 0.0;
  int steps = 0;
  double err_y = 0.0;  ///< max-norm at T; +inf when the run diverged
  double err_z = 0.0;
  bool diverged = false;
  std::string note;  ///< failure message of a diverged run
};

/// Least-squares slopes of log(err) against log(H) over rows [first, last].
/// A component is empty when the problem has no such component.
struct FitResult {
  std::size_t first = 0, last = 0;
  std::optional<double> y, z;
};

struct ErrorTable {
  std::string problem;
  std::string scheme;
  double eps = 0.0;
  double T = 0.0;
  std::vector<ErrorRow> rows;  ///< H strictly decreasing
  std::optional<FitResult> fit;
  std::string verdict = "ok";  ///< "ok" or "diverged"
  /// Max-norm gap between the reference at H_ref and H_ref/2; zero when the
  /// problem has an exact solution.
  double reference_deviation = 0.0;
  int reference_steps = 0;
};

struct SweepOptions {
  int reference_factor = 64;        ///< H_ref = min(H) / factor
  int max_reference_steps = 32768;  ///< cap on T / H_ref, 0 for none
  double reference_tol = 1e-10;
};

/// H0, H0/2, ..., H0/2^halvings.
std::vector<double> halving_list(double H0, int halvings);

/// Runs `scheme` on the named problem at every H. Errors are measured at T
/// against the exact solution when the problem has one, otherwise against a
/// RadauIIA3 (M=6, K=0) run at H_ref, which must agree with a run at H_ref/2
/// to reference_tol (harness_error otherwise). Rows run in parallel. A row
/// whose solve throws step_error or divergence_error is marked diverged.
ErrorTable sweep(const std::string& problem, const IndcScheme& scheme, double eps, double T,
                 const std::vector<double>& H_list, const SweepOptions& opts = {});

/// Plain least-squares slope of log(err) versus log(H).
double fit_slope(const std::vector<double>& H, const std::vector<double>& err);

/// Needs at least three rows, all finite and positive in each fitted
/// component; throws usage_error otherwise.
FitResult fit_order(const ErrorTable& table, std::size_t first, std::size_t last);

/// Error exponents for a scheme whose loops are all stiffly accurate with
/// invertible A:
///
///     err = O(H^min(s_K, M)) + O(eps H^q0)
///
/// with s_K the sum of the loop orders and q0 the stage order of the
/// prediction. Otherwise `diverges` is set.
struct OrderPrediction {
  bool diverges = false;
  int leading = 0;
  int eps_exponent = 0;
  int s_K = 0;
  /// Crossover eps^(1 / (s_K - q0)); unset when s_K <= q0.
  std::optional<double> dip_H;
};

OrderPrediction predict(const IndcScheme& scheme, double eps);

enum class CheckStatus { pass, fail, skipped };

struct Check {
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  std::string detail;
};

struct VerifyOptions {
  double tolerance = 0.35;
  /// Row ranges overriding the automatic split at dip_H.
  std::optional<std::pair<std::size_t, std::size_t>> large_window, small_window;
};

struct VerifyReport {
  std::vector<Check> checks;
  std::optional<FitResult> large, small;
  /// H of a local error minimum within a factor 4 of dip_H, if one exists.
  std::optional<double> dip_found;
  bool pass() const;
};

/// Compares fitted slopes with the prediction. Rows with H > dip_H form the
/// large-H window (leading exponent), rows with H < dip_H the small-H window
/// (eps exponent). Without a dip every row is fitted against
/// min(leading, eps_exponent). Windows with fewer than three rows are
/// skipped. A predicted divergence passes iff the table diverged.
VerifyReport verify(const ErrorTable& table, const OrderPrediction& prediction,
                    const VerifyOptions& opts = {});

/// Outcome of running a scheme next to its own prediction loop alone.
struct DivergenceRow {
  double H = 0.0;
  bool diverged = false;
  double err = 0.0;       ///< max of err_y, err_z for the full scheme
  double base_err = 0.0;  ///< same for K = 0
  bool flagged = false;   ///< diverged, or err >= 10 * base_err
};

std::vector<DivergenceRow> divergence_check(const std::string& problem,
                                            const IndcScheme& scheme, double eps,
                                            double T, const std::vector<double>& H_list);

/// "H,err_y,err_z,ratio_y,ratio_z"; ratios are err(previous H) / err(H) and
/// empty on the first row.
std::string table_csv(const ErrorTable& table);

/// Table, prediction, fitted slopes and check verdicts as one JSON document.
std::string report_json(const ErrorTable& table, const OrderPrediction& prediction,
                        const VerifyReport& report);

}  // namespace indc
