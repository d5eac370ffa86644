// SPDX-License-Identifier: Apache-2.0
#include "indc/cli.hpp"

#include "indc/compose.hpp"
#include "indc/errors.hpp"
#include "indc/harness.hpp"
#include "indc/quadrature.hpp"
#include "indc/scheme_spec.hpp"
#include "indc/stability.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace indc::cli {

namespace {

using json = nlohmann::ordered_json;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw usage_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw usage_error("failed writing '" + path + "'");
}

std::string vector_text(const Vector& v) {
  std::ostringstream os;
  os << std::setprecision(17) << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v(i);
  os << ']';
  return os.str();
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Long-format CSV so that matrices of different widths share one file.
std::string matrices_csv(const IndcGrid& grid, const StageOperators& ops) {
  std::ostringstream os;
  os << std::setprecision(17) << "matrix,row,col,value\n";
  const auto emit = [&os](const char* name, const Matrix& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        os << name << ',' << i << ',' << j << ',' << m(i, j) << '\n';
  };
  emit("S", grid.S());
  emit("Sc", ops.Sc);
  emit("Pc", ops.Pc);
  return os.str();
}

Window parse_window(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw usage_error("--window expects four numbers a,b,c,d; got '" + text + "'");
    }
  }
  if (v.size() != 4) throw usage_error("--window expects four numbers a,b,c,d; got '" + text + "'");
  return Window{v[0], v[1], v[2], v[3]};
}

void report_error(std::ostream& err, bool as_json, const std::string& kind,
                  const std::exception& e) {
  if (!as_json) {
    err << "error: " << e.what() << '\n';
    return;
  }
  json j = {{"error", kind}, {"message", e.what()}};
  if (const auto* s = dynamic_cast<const step_error*>(&e)) {
    j["step"] = s->step();
    j["loop"] = s->loop();
    j["substep"] = s->substep();
    j["residual"] = s->residual();
  } else if (const auto* d = dynamic_cast<const divergence_error*>(&e)) {
    j["step"] = d->step();
    j["loop"] = d->loop();
    j["substep"] = d->substep();
  } else if (const auto* n = dynamic_cast<const newton_error*>(&e)) {
    j["residual"] = n->residual();
    j["iterations"] = n->iterations();
  } else if (const auto* p = dynamic_cast<const pole_error*>(&e)) {
    j["z"] = {p->z().real(), p->z().imag()};
  }
  err << j.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Integral deferred correction solvers for singularly perturbed problems"};
  app.name("indc");
  app.require_subcommand(0, 1);
  app.fallthrough();
  bool json_errors = false;
  app.add_flag("--json-errors", json_errors, "Report errors on stderr as JSON");

  std::function<void()> action;

  // tableau
  auto* tab = app.add_subcommand("tableau", "Show a built-in Butcher tableau");
  std::string tab_name;
  bool tab_json = false, tab_dump = false;
  int tab_M = 0;
  tab->add_option("--name", tab_name, "Tableau name (lists all when omitted)");
  tab->add_flag("--json", tab_json, "Print JSON instead of the Butcher array");
  tab->add_flag("--dump-matrices", tab_dump, "Print S, Sc and Pc for --M nodes as CSV");
  tab->add_option("--M", tab_M, "Number of nodes for --dump-matrices");
  tab->callback([&] {
    action = [&] {
      if (tab_name.empty()) {
        if (tab_dump) throw usage_error("--dump-matrices needs --name");
        for (const auto& n : builtin_names()) out << n << '\n';
        return;
      }
      const ButcherTableau t = builtin(tab_name);
      if (tab_dump) {
        if (tab_M < 1) throw usage_error("--dump-matrices needs --M >= 1");
        const IndcGrid grid = build_grid(tab_M);
        out << matrices_csv(grid, stage_operators(grid, t));
      } else if (tab_json) {
        out << to_json(t);
      } else {
        out << to_text(t);
      }
    };
  });

  // solve
  auto* sol = app.add_subcommand("solve", "Integrate a test problem");
  std::string sol_problem, sol_scheme, sol_trace;
  double sol_eps = 1e-6, sol_T = 0.5;
  int sol_steps = 0;
  bool sol_json = false;
  sol->add_option("--problem", sol_problem, "Problem name")->required();
  sol->add_option("--eps", sol_eps, "Stiffness parameter")->capture_default_str();
  sol->add_option("--scheme", sol_scheme, "Scheme spec, e.g. BE:M=3,K=2")->required();
  sol->add_option("--T", sol_T, "Final time")->capture_default_str();
  sol->add_option("--steps", sol_steps, "Number of steps")->required();
  sol->add_option("--trace", sol_trace, "Write node values of every loop as CSV");
  sol->add_flag("--json", sol_json, "Print the result as JSON");
  sol->callback([&] {
    action = [&] {
      const SppProblem p = problem_by_name(sol_problem, sol_eps);
      const IndcScheme scheme = parse_scheme(sol_scheme);
      if (scheme.warning())
        err << "warning: scheme uses a tableau that is not stiffly accurate or has singular A; "
               "expect divergence on stiff problems\n";
      SolveOptions opts;
      opts.record_trace = !sol_trace.empty();
      const SolveResult r = solve(p, scheme, sol_T, sol_steps, opts);
      if (!sol_trace.empty()) {
        std::ostringstream os;
        os << std::setprecision(17) << "step,node,t";
        for (int i = 0; i < p.dim_y; ++i) os << ",y" << i;
        for (int i = 0; i < p.dim_z; ++i) os << ",z" << i;
        os << ",loop\n";
        for (const auto& row : r.trace) {
          os << row.step << ',' << row.node << ',' << row.t;
          for (Eigen::Index i = 0; i < row.y.size(); ++i) os << ',' << row.y(i);
          for (Eigen::Index i = 0; i < row.z.size(); ++i) os << ',' << row.z(i);
          os << ',' << row.loop << '\n';
        }
        write_file(sol_trace, os.str());
      }
      if (sol_json) {
        json j = {{"problem", p.name},
                  {"scheme", format_scheme(scheme)},
                  {"eps", sol_eps},
                  {"T", sol_T},
                  {"steps", sol_steps},
                  {"y", vector_json(r.y_final())},
                  {"z", vector_json(r.z_final())},
                  {"newton_iterations", r.newton_iterations}};
        if (p.exact) {
          const auto [ye, ze] = p.exact(p.t0 + sol_T);
          j["y_exact"] = vector_json(ye);
          j["z_exact"] = vector_json(ze);
        }
        out << j.dump(2) << '\n';
      } else {
        out << "problem " << p.name << ", scheme " << format_scheme(scheme) << ", T " << sol_T
            << ", steps " << sol_steps << '\n'
            << "y(T) = " << vector_text(r.y_final()) << '\n'
            << "z(T) = " << vector_text(r.z_final()) << '\n'
            << "Newton iterations: " << r.newton_iterations << '\n';
      }
    };
  });

  // converge
  auto* con = app.add_subcommand("converge", "Step-size sweep with fitted orders");
  std::string con_problem, con_scheme, con_out, con_json;
  double con_eps = 1e-6, con_T = 0.5, con_H = 0.125;
  int con_halvings = 6;
  con->add_option("--problem", con_problem, "Problem name")->required();
  con->add_option("--eps", con_eps, "Stiffness parameter")->capture_default_str();
  con->add_option("--scheme", con_scheme, "Scheme spec")->required();
  con->add_option("--T", con_T, "Final time")->capture_default_str();
  con->add_option("--H", con_H, "Largest step size")->capture_default_str();
  con->add_option("--halvings", con_halvings, "Number of halvings of H")->capture_default_str();
  con->add_option("--out", con_out, "Write the error table as CSV (stdout when omitted)");
  con->add_option("--json", con_json, "Write the JSON report");
  con->callback([&] {
    action = [&] {
      const IndcScheme scheme = parse_scheme(con_scheme);
      ErrorTable table =
          sweep(con_problem, scheme, con_eps, con_T, halving_list(con_H, con_halvings));
      if (table.rows.size() >= 3 && table.verdict == "ok")
        table.fit = fit_order(table, 0, table.rows.size() - 1);
      const OrderPrediction prediction = predict(scheme, con_eps);
      const VerifyReport report = verify(table, prediction);

      const std::string csv = table_csv(table);
      if (con_out.empty())
        out << csv;
      else
        write_file(con_out, csv);
      if (!con_json.empty()) write_file(con_json, report_json(table, prediction, report));

      out << "# " << table.scheme << " on " << table.problem << ", eps " << con_eps << ", verdict "
          << table.verdict << '\n';
      if (table.fit) {
        out << "# slope over all rows: y "
            << (table.fit->y ? std::to_string(*table.fit->y) : std::string("n/a")) << ", z "
            << (table.fit->z ? std::to_string(*table.fit->z) : std::string("n/a")) << '\n';
      }
      for (const auto& c : report.checks) {
        const char* status = c.status == CheckStatus::pass   ? "pass"
                             : c.status == CheckStatus::fail ? "FAIL"
                                                             : "skip";
        out << "# " << status << "  " << c.name << ": " << c.detail << '\n';
      }
    };
  });

  // compose
  auto* com = app.add_subcommand("compose", "Single tableau equivalent to InDC-BE");
  int com_M = 0, com_K = 1;
  std::string com_out;
  com->add_option("--M", com_M, "Number of nodes")->required();
  com->add_option("--K", com_K, "Number of corrections")->capture_default_str();
  com->add_option("--out", com_out, "Write tableau JSON here (stdout when omitted)");
  com->callback([&] {
    action = [&] {
      const ComposedTableau c = compose_indc_be(com_M, com_K);
      std::string text = to_json(c.tableau);
      if (text.empty() || text.back() != '\n') text += '\n';
      if (com_out.empty())
        out << text;
      else
        write_file(com_out, text);
    };
  });

  // stability
  auto* sta = app.add_subcommand("stability", "Sample |R(z)| and extract the region boundary");
  std::string sta_scheme, sta_window = "-20,5,-15,15", sta_out, sta_boundary, sta_svg;
  int sta_res = 200;
  bool sta_left = false;
  sta->add_option("--scheme", sta_scheme, "Scheme spec")->required();
  sta->add_option("--window", sta_window, "re_min,re_max,im_min,im_max")->capture_default_str();
  sta->add_option("--res", sta_res, "Samples per axis")->capture_default_str();
  sta->add_option("--out", sta_out, "Write re,im,absR samples as CSV");
  sta->add_option("--boundary", sta_boundary, "Write |R| = 1 polylines as CSV");
  sta->add_option("--svg", sta_svg, "Write an SVG picture of the region");
  sta->add_flag("--include-left", sta_left,
                "Diagnostic: interpolate through the step's left endpoint too");
  sta->callback([&] {
    action = [&] {
      const IndcScheme scheme = parse_scheme(sta_scheme);
      const StabilityScan scan = scan_region(scheme, parse_window(sta_window), sta_res, sta_left);
      if (!sta_out.empty()) write_file(sta_out, region_csv(scan));
      if (!sta_boundary.empty()) write_file(sta_boundary, boundary_csv(scan));
      if (!sta_svg.empty()) write_file(sta_svg, region_svg(scan, format_scheme(scheme)));
      const LProbe probe = l_stability_probe(scheme, sta_left);
      out << "scheme " << format_scheme(scheme) << (sta_left ? " (left endpoint included)" : "")
          << '\n'
          << "A-stable (sampled): " << (scan.a_stable_sampled ? "yes" : "no") << '\n'
          << "L-stable probe: " << (probe.pass ? "pass" : "fail")
          << ", |R(-1e8)| = " << probe.limit_estimate << '\n'
          << "stable area in window: " << scan.stable_area() << '\n'
          << "boundary polylines: " << scan.boundary.size() << '\n';
    };
  });

  if (args.empty()) {
    err << app.help();
    return exit_usage;
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_ok;
  } catch (const CLI::ParseError& e) {
    report_error(err, json_errors, "usage", e);
    return exit_usage;
  } catch (const usage_error& e) {
    report_error(err, json_errors, "usage", e);
    return exit_usage;
  }

  if (!action) {
    err << app.help();
    return exit_usage;
  }
  try {
    action();
  } catch (const usage_error& e) {
    report_error(err, json_errors, "usage", e);
    return exit_usage;
  } catch (const numerical_error& e) {
    report_error(err, json_errors, "numerical", e);
    return exit_numerical;
  }
  return exit_ok;
}

}  // namespace indc::cli
