// SPDX-License-Identifier: Apache-2.0
#include "indc/harness.hpp"

#include "indc/parallel.hpp"
#include "indc/scheme_spec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <tuple>

namespace indc {

namespace {

using json = nlohmann::ordered_json;

constexpr double inf = std::numeric_limits<double>::infinity();

int steps_for(double T, double H) {
  const double n = T / H;
  const double rounded = std::round(n);
  if (!(H > 0.0) || rounded < 1.0 || std::abs(n - rounded) > 1e-9 * rounded)
    throw usage_error("step size " + std::to_string(H) + " does not divide T = " +
                      std::to_string(T));
  return static_cast<int>(rounded);
}

double max_error(const Vector& a, const Vector& b) {
  return a.size() == 0 ? 0.0 : (a - b).lpNorm<Eigen::Infinity>();
}

struct Reference {
  Vector y, z;
  double deviation = 0.0;
  int steps = 0;
};

// Reference runs are shared between sweeps of the same problem and T.
Reference reference_solution(const std::string& problem, const SppProblem& p, double T,
                             int steps, double tol) {
  static std::mutex mutex;
  static std::map<std::tuple<std::string, double, double, int>, Reference> cache;
  const auto key = std::make_tuple(problem, p.eps, T, steps);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const IndcScheme oracle = uniform_scheme(builtin("RadauIIA3"), 6, 0);
  SolveResult coarse, fine;
  try {
    coarse = solve(p, oracle, T, steps);
    fine = solve(p, oracle, T, 2 * steps);
  } catch (const numerical_error& e) {
    throw harness_error(std::string("reference solution failed: ") + e.what());
  }
  Reference ref{fine.y_final(), fine.z_final(), 0.0, 2 * steps};
  ref.deviation = std::max(max_error(coarse.y_final(), ref.y), max_error(coarse.z_final(), ref.z));
  if (!(ref.deviation <= tol)) {
    std::ostringstream os;
    os << "reference solution is not self-consistent: runs with " << steps << " and "
       << 2 * steps << " steps differ by " << ref.deviation << " (tolerance " << tol << ")";
    throw harness_error(os.str());
  }
  std::lock_guard lock(mutex);
  cache.emplace(key, ref);
  return ref;
}

std::optional<double> component_slope(const ErrorTable& table, std::size_t first,
                                      std::size_t last, bool y_component) {
  std::vector<double> H, err;
  bool all_zero = true;
  for (std::size_t i = first; i <= last; ++i) {
    const double e = y_component ? table.rows[i].err_y : table.rows[i].err_z;
    H.push_back(table.rows[i].H);
    err.push_back(e);
    all_zero = all_zero && e == 0.0;
  }
  if (all_zero) return std::nullopt;
  for (double e : err)
    if (!(std::isfinite(e) && e > 0.0))
      throw usage_error(std::string("fit window holds a non-finite or zero ") +
                        (y_component ? "y" : "z") + " error");
  return fit_slope(H, err);
}

std::string format_slope(const std::optional<double>& s) {
  if (!s) return "n/a";
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << *s;
  return os.str();
}

Check slope_check(const std::string& name, const std::optional<FitResult>& fit, int expected,
                  double tol) {
  Check c{name, CheckStatus::skipped, ""};
  if (!fit) {
    c.detail = "window has fewer than 3 rows";
    return c;
  }
  bool any = false, ok = true;
  for (const auto& s : {fit->y, fit->z}) {
    if (!s) continue;
    any = true;
    ok = ok && std::abs(*s - expected) <= tol;
  }
  c.detail = "expected " + std::to_string(expected) + " +- " + format_slope(tol) +
             ", fitted y " + format_slope(fit->y) + ", z " + format_slope(fit->z);
  if (any) c.status = ok ? CheckStatus::pass : CheckStatus::fail;
  return c;
}

json optional_json(const std::optional<double>& v) {
  return v ? json(*v) : json(nullptr);
}

json fit_json(const std::optional<FitResult>& f) {
  if (!f) return nullptr;
  return {{"first", f->first}, {"last", f->last}, {"y", optional_json(f->y)},
          {"z", optional_json(f->z)}};
}

json number_json(double v) {
  return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

std::vector<double> halving_list(double H0, int halvings) {
  if (!(H0 > 0.0) || halvings < 0) throw usage_error("need H0 > 0 and halvings >= 0");
  std::vector<double> out;
  for (int i = 0; i <= halvings; ++i) out.push_back(std::ldexp(H0, -i));
  return out;
}

ErrorTable sweep(const std::string& problem, const IndcScheme& scheme, double eps, double T,
                 const std::vector<double>& H_list, const SweepOptions& opts) {
  if (H_list.empty()) throw usage_error("sweep needs at least one step size");
  for (std::size_t i = 1; i < H_list.size(); ++i)
    if (!(H_list[i] < H_list[i - 1])) throw usage_error("step sizes must strictly decrease");
  std::vector<int> steps;
  for (double H : H_list) steps.push_back(steps_for(T, H));

  const SppProblem p = problem_by_name(problem, eps);
  ErrorTable table;
  table.problem = p.name;
  table.scheme = format_scheme(scheme);
  table.eps = eps;
  table.T = T;

  Vector y_ref, z_ref;
  if (p.exact) {
    std::tie(y_ref, z_ref) = p.exact(p.t0 + T);
  } else {
    const double H_ref = H_list.back() / opts.reference_factor;
    int n_ref = static_cast<int>(std::ceil(T / H_ref - 1e-9));
    if (opts.max_reference_steps > 0) n_ref = std::min(n_ref, opts.max_reference_steps);
    const Reference ref = reference_solution(problem, p, T, n_ref, opts.reference_tol);
    y_ref = ref.y;
    z_ref = ref.z;
    table.reference_deviation = ref.deviation;
    table.reference_steps = n_ref;
  }

  table.rows.resize(H_list.size());
  parallel_for(H_list.size(), [&](std::size_t i) {
    ErrorRow& row = table.rows[i];
    row.H = H_list[i];
    row.steps = steps[i];
    try {
      const SolveResult r = solve(p, scheme, T, steps[i]);
      row.err_y = max_error(r.y_final(), y_ref);
      row.err_z = max_error(r.z_final(), z_ref);
      if (!std::isfinite(row.err_y) || !std::isfinite(row.err_z)) {
        row.diverged = true;
        row.note = "non-finite error";
      }
    } catch (const step_error& e) {
      row.diverged = true;
      row.note = e.what();
    } catch (const divergence_error& e) {
      row.diverged = true;
      row.note = e.what();
    }
    if (row.diverged) row.err_y = row.err_z = inf;
  });
  for (const auto& row : table.rows)
    if (row.diverged) table.verdict = "diverged";
  return table;
}

double fit_slope(const std::vector<double>& H, const std::vector<double>& err) {
  const std::size_t n = H.size();
  if (n < 2 || err.size() != n) throw usage_error("fit needs matching data of length >= 2");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(H[i]);
    my += std::log(err[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(H[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw usage_error("fit needs distinct step sizes");
  return sxy / sxx;
}

FitResult fit_order(const ErrorTable& table, std::size_t first, std::size_t last) {
  if (last >= table.rows.size() || first > last || last - first + 1 < 3)
    throw usage_error("fit window needs at least 3 rows inside the table");
  FitResult out;
  out.first = first;
  out.last = last;
  out.y = component_slope(table, first, last, true);
  out.z = component_slope(table, first, last, false);
  return out;
}

OrderPrediction predict(const IndcScheme& scheme, double eps) {
  OrderPrediction out;
  for (const auto& t : scheme.methods)
    if (!is_stiffly_accurate(t) || !has_invertible_A(t)) out.diverges = true;
  if (out.diverges) return out;

  for (const auto& t : scheme.methods) {
    if (!t.order) throw usage_error("tableau '" + t.name + "' carries no order");
    out.s_K += *t.order;
  }
  const auto& base = scheme.methods.front();
  if (!base.stage_order) throw usage_error("tableau '" + base.name + "' carries no stage order");
  out.leading = std::min(out.s_K, scheme.M);
  out.eps_exponent = *base.stage_order;
  if (out.s_K > out.eps_exponent && eps > 0.0)
    out.dip_H = std::pow(eps, 1.0 / (out.s_K - out.eps_exponent));
  return out;
}

bool VerifyReport::pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const Check& c) { return c.status == CheckStatus::fail; });
}

VerifyReport verify(const ErrorTable& table, const OrderPrediction& prediction,
                    const VerifyOptions& opts) {
  VerifyReport report;
  const bool diverged = table.verdict == "diverged";
  if (prediction.diverges) {
    report.checks.push_back({"divergence", diverged ? CheckStatus::pass : CheckStatus::fail,
                             diverged ? "diverged as predicted"
                                      : "predicted to diverge but every run stayed bounded"});
    return report;
  }
  report.checks.push_back({"no divergence", diverged ? CheckStatus::fail : CheckStatus::pass,
                           diverged ? "a run diverged" : "all runs bounded"});
  if (diverged) return report;

  const auto& rows = table.rows;
  const auto fit_range = [&](std::size_t first, std::size_t last) -> std::optional<FitResult> {
    if (last >= rows.size() || first > last || last - first + 1 < 3) return std::nullopt;
    return fit_order(table, first, last);
  };
  const auto split = [&](bool large) -> std::optional<FitResult> {
    std::optional<std::size_t> first, last;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const bool in = large ? rows[i].H > *prediction.dip_H : rows[i].H < *prediction.dip_H;
      if (!in) continue;
      if (!first) first = i;
      last = i;
    }
    if (!first) return std::nullopt;
    return fit_range(*first, *last);
  };

  if (!prediction.dip_H && !opts.large_window && !opts.small_window) {
    report.large = fit_range(0, rows.size() - 1);
    report.checks.push_back(
        slope_check("order", report.large,
                    std::min(prediction.leading, prediction.eps_exponent), opts.tolerance));
    return report;
  }

  report.large = opts.large_window ? fit_range(opts.large_window->first, opts.large_window->second)
                                   : split(true);
  report.small = opts.small_window ? fit_range(opts.small_window->first, opts.small_window->second)
                                   : (prediction.dip_H ? split(false) : std::nullopt);
  report.checks.push_back(
      slope_check("large-H order", report.large, prediction.leading, opts.tolerance));
  report.checks.push_back(
      slope_check("small-H order", report.small, prediction.eps_exponent, opts.tolerance));

  if (prediction.dip_H) {
    for (std::size_t i = 1; i + 1 < rows.size(); ++i) {
      const auto is_min = [&](auto err) {
        return err(rows[i]) < err(rows[i - 1]) && err(rows[i]) < err(rows[i + 1]);
      };
      const bool minimum = is_min([](const ErrorRow& r) { return r.err_y; }) ||
                           is_min([](const ErrorRow& r) { return r.err_z; });
      const double ratio = rows[i].H / *prediction.dip_H;
      if (minimum && ratio <= 4.0 && ratio >= 0.25) {
        report.dip_found = rows[i].H;
        break;
      }
    }
    Check dip{"cancellation dip", CheckStatus::skipped, "reported only"};
    dip.detail += report.dip_found ? ", local minimum at H = " + std::to_string(*report.dip_found)
                                   : ", no local minimum near the crossover";
    report.checks.push_back(dip);
  }
  return report;
}

std::vector<DivergenceRow> divergence_check(const std::string& problem,
                                            const IndcScheme& scheme, double eps,
                                            double T, const std::vector<double>& H_list) {
  IndcScheme base = scheme;
  base.methods.resize(1);
  const ErrorTable full = sweep(problem, scheme, eps, T, H_list);
  const ErrorTable pred = sweep(problem, base, eps, T, H_list);
  std::vector<DivergenceRow> out;
  for (std::size_t i = 0; i < H_list.size(); ++i) {
    DivergenceRow row;
    row.H = H_list[i];
    row.diverged = full.rows[i].diverged;
    row.err = std::max(full.rows[i].err_y, full.rows[i].err_z);
    row.base_err = std::max(pred.rows[i].err_y, pred.rows[i].err_z);
    row.flagged = row.diverged || row.err >= 10.0 * row.base_err;
    out.push_back(row);
  }
  return out;
}

std::string table_csv(const ErrorTable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "H,err_y,err_z,ratio_y,ratio_z\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const ErrorRow& r = table.rows[i];
    os << r.H << ',' << r.err_y << ',' << r.err_z << ',';
    if (i > 0) {
      const ErrorRow& prev = table.rows[i - 1];
      if (r.err_y > 0) os << prev.err_y / r.err_y;
      os << ',';
      if (r.err_z > 0) os << prev.err_z / r.err_z;
    } else {
      os << ',';
    }
    os << '\n';
  }
  return os.str();
}

std::string report_json(const ErrorTable& table, const OrderPrediction& prediction,
                        const VerifyReport& report) {
  json rows = json::array();
  for (const auto& r : table.rows) {
    json row = {{"H", r.H}, {"steps", r.steps}, {"err_y", number_json(r.err_y)},
                {"err_z", number_json(r.err_z)}, {"diverged", r.diverged}};
    if (!r.note.empty()) row["note"] = r.note;
    rows.push_back(row);
  }
  json checks = json::array();
  for (const auto& c : report.checks) {
    const char* status = c.status == CheckStatus::pass   ? "pass"
                         : c.status == CheckStatus::fail ? "fail"
                                                         : "skipped";
    checks.push_back({{"name", c.name}, {"status", status}, {"detail", c.detail}});
  }
  json pred = {{"diverges", prediction.diverges}};
  if (!prediction.diverges) {
    pred["leading"] = prediction.leading;
    pred["eps_exponent"] = prediction.eps_exponent;
    pred["s_K"] = prediction.s_K;
    pred["dip_H"] = optional_json(prediction.dip_H);
  }
  json doc = {{"problem", table.problem},
              {"scheme", table.scheme},
              {"eps", table.eps},
              {"T", table.T},
              {"verdict", table.verdict},
              {"reference_steps", table.reference_steps},
              {"reference_deviation", table.reference_deviation},
              {"rows", rows},
              {"prediction", pred},
              {"fit", fit_json(table.fit)},
              {"large_window", fit_json(report.large)},
              {"small_window", fit_json(report.small)},
              {"dip_found", optional_json(report.dip_found)},
              {"checks", checks},
              {"pass", report.pass()}};
  return doc.dump(2) + "\n";
}

}  // namespace indc
