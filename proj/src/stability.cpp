// SPDX-License-Identifier: Apache-2.0
#include "indc/stability.hpp"

#include "indc/errors.hpp"
#include "indc/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace indc {

namespace {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

}  // namespace

Amplification::Amplification(IndcScheme scheme, bool include_left)
    : scheme_(std::move(scheme)), grid_(build_grid(scheme_.M, include_left)) {
  ops_.reserve(scheme_.methods.size());
  for (const auto& t : scheme_.methods) ops_.push_back(stage_operators(grid_, t));
}

Complex Amplification::operator()(Complex z) const {
  const int M = grid_.M();
  const Complex w = z / static_cast<double>(M);
  const int width = grid_.stencil_size();

  CVector r(M + 1);
  CVector bar;  // previous loop's node values on the stencil
  for (std::size_t k = 0; k < scheme_.methods.size(); ++k) {
    const ButcherTableau& t = scheme_.methods[k];
    const int s = t.stages();
    const CMatrix A = t.A.cast<Complex>();
    const CMatrix lhs = CMatrix::Identity(s, s) - w * A;
    const Eigen::PartialPivLU<CMatrix> lu(lhs);
    const double rcond = lu.rcond();
    if (!(std::isfinite(rcond) && rcond > 1e-15))
      throw pole_error("stage matrix I - (z/M)A is singular", z);
    const bool sa = is_stiffly_accurate(t);

    r.setZero();
    r(0) = 1.0;
    for (int m = 0; m < M; ++m) {
      CVector rhs = CVector::Constant(s, r(m));
      Complex quad = 0.0;
      CVector interp = CVector::Zero(s);
      if (k > 0) {
        const CMatrix Sc = ops_[k].Sc.middleRows(m * s, s).cast<Complex>();
        const CMatrix Pc = ops_[k].Pc.middleRows(m * s, s).cast<Complex>();
        interp = Pc * bar;
        rhs += w * (Sc * bar - A * interp);
        quad = grid_.S().row(m).cast<Complex>().dot(bar);
      }
      const CVector X = lu.solve(rhs);
      if (sa)
        r(m + 1) = X(s - 1);
      else
        r(m + 1) = r(m) + w * (quad + t.b.cast<Complex>().dot(X - interp));
    }
    bar.resize(width);
    for (int col = 0; col < width; ++col) {
      const int node = grid_.include_left() ? col : col + 1;
      bar(col) = r(node);
    }
  }
  return r(M);
}

Complex amplification(const IndcScheme& scheme, Complex z, bool include_left) {
  return Amplification(scheme, include_left)(z);
}

LProbe l_stability_probe(const Amplification& amp) {
  LProbe out;
  bool decreasing = true;
  for (double mag : {1e2, 1e4, 1e6, 1e8}) {
    double v;
    try {
      v = std::abs(amp(Complex(-mag, 0.0)));
    } catch (const pole_error&) {
      v = std::numeric_limits<double>::infinity();
    }
    if (!out.values.empty() && !(v < out.values.back() || (v == 0.0 && out.values.back() == 0.0)))
      decreasing = false;
    out.values.push_back(v);
  }
  out.limit_estimate = out.values.back();
  out.pass = decreasing && out.limit_estimate <= 1e-5;
  return out;
}

LProbe l_stability_probe(const IndcScheme& scheme, bool include_left) {
  return l_stability_probe(Amplification(scheme, include_left));
}

double StabilityScan::re(int i) const {
  return window.re_min + (window.re_max - window.re_min) * i / (n - 1);
}

double StabilityScan::im(int j) const {
  return window.im_min + (window.im_max - window.im_min) * j / (n - 1);
}

double StabilityScan::stable_area() const {
  const double cell = (window.re_max - window.re_min) / (n - 1) *
                      ((window.im_max - window.im_min) / (n - 1));
  return cell * static_cast<double>((abs_r.array() <= 1.0).count());
}

StabilityScan scan_region(const IndcScheme& scheme, const Window& window, int n,
                          bool include_left) {
  if (n < 16) throw usage_error("scan resolution must be >= 16, got " + std::to_string(n));
  if (!(window.re_min < window.re_max && window.im_min < window.im_max))
    throw usage_error("empty stability window");

  const Amplification amp(scheme, include_left);
  StabilityScan scan;
  scan.window = window;
  scan.n = n;
  scan.abs_r.resize(n, n);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t row) {
    const int j = static_cast<int>(row);
    for (int i = 0; i < n; ++i) {
      double v;
      try {
        v = std::abs(amp(Complex(scan.re(i), scan.im(j))));
      } catch (const pole_error&) {
        v = std::numeric_limits<double>::infinity();
      }
      scan.abs_r(j, i) = v;
    }
  });

  bool a_stable = true;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (scan.re(i) < 0.0 && !(scan.abs_r(j, i) <= 1.0 + 1e-9)) a_stable = false;
  scan.a_stable_sampled = a_stable;
  scan.l_stable_sampled = l_stability_probe(amp).pass;

  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) xs[i] = scan.re(i);
  for (int j = 0; j < n; ++j) ys[j] = scan.im(j);
  // log|R| is close to linear across the level set and tames the poles.
  const Matrix field = scan.abs_r.unaryExpr([](double v) {
    return std::clamp(std::log(v), -50.0, 50.0);
  });
  scan.boundary = marching_squares(field, xs, ys, 0.0);
  return scan;
}

std::vector<Polyline> marching_squares(const Matrix& field, const std::vector<double>& xs,
                                       const std::vector<double>& ys, double level) {
  const long nx = static_cast<long>(xs.size());
  const long ny = static_cast<long>(ys.size());
  if (field.rows() != ny || field.cols() != nx)
    throw usage_error("marching_squares: field shape does not match the axes");

  // Edge keys: 2*(j*nx + i) for the edge (i,j)-(i+1,j), +1 for (i,j)-(i,j+1).
  std::unordered_map<long, Point> points;
  const auto edge_point = [&](long key) {
    if (auto it = points.find(key); it != points.end()) return;
    const long base = key / 2;
    const long i = base % nx, j = base / nx;
    const bool vertical = key % 2 == 1;
    const long i2 = vertical ? i : i + 1, j2 = vertical ? j + 1 : j;
    const double a = field(j, i), b = field(j2, i2);
    const double t = a == b ? 0.5 : (level - a) / (b - a);
    points[key] = {xs[i] + t * (xs[i2] - xs[i]), ys[j] + t * (ys[j2] - ys[j])};
  };

  std::vector<std::pair<long, long>> segments;
  for (long j = 0; j + 1 < ny; ++j) {
    for (long i = 0; i + 1 < nx; ++i) {
      const double v[4] = {field(j, i), field(j, i + 1), field(j + 1, i + 1), field(j + 1, i)};
      bool above[4];
      for (int c = 0; c < 4; ++c) above[c] = v[c] > level;
      // Edge e joins corner e and corner (e+1)%4: bottom, right, top, left.
      const long keys[4] = {2 * (j * nx + i), 2 * (j * nx + i + 1) + 1, 2 * ((j + 1) * nx + i),
                            2 * (j * nx + i) + 1};
      std::vector<int> crossed;
      for (int e = 0; e < 4; ++e)
        if (above[e] != above[(e + 1) % 4]) crossed.push_back(e);
      if (crossed.size() == 2) {
        segments.emplace_back(keys[crossed[0]], keys[crossed[1]]);
      } else if (crossed.size() == 4) {
        const bool center = (v[0] + v[1] + v[2] + v[3]) / 4.0 > level;
        if (center == above[0]) {
          segments.emplace_back(keys[0], keys[1]);
          segments.emplace_back(keys[2], keys[3]);
        } else {
          segments.emplace_back(keys[3], keys[0]);
          segments.emplace_back(keys[1], keys[2]);
        }
      }
    }
  }
  for (const auto& [a, b] : segments) {
    edge_point(a);
    edge_point(b);
  }

  std::unordered_map<long, std::vector<std::size_t>> touching;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    touching[segments[s].first].push_back(s);
    touching[segments[s].second].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  const auto next_from = [&](long key) -> std::optional<std::pair<std::size_t, long>> {
    for (std::size_t s : touching[key]) {
      if (used[s]) continue;
      const long other = segments[s].first == key ? segments[s].second : segments[s].first;
      return std::make_pair(s, other);
    }
    return std::nullopt;
  };

  std::vector<Polyline> lines;
  for (std::size_t s0 = 0; s0 < segments.size(); ++s0) {
    if (used[s0]) continue;
    used[s0] = true;
    std::deque<long> chain{segments[s0].first, segments[s0].second};
    while (auto step = next_from(chain.back())) {
      used[step->first] = true;
      chain.push_back(step->second);
    }
    while (auto step = next_from(chain.front())) {
      used[step->first] = true;
      chain.push_front(step->second);
    }
    Polyline line;
    line.reserve(chain.size());
    for (long key : chain) line.push_back(points.at(key));
    lines.push_back(std::move(line));
  }
  return lines;
}

std::string region_csv(const StabilityScan& scan) {
  std::ostringstream os;
  os << std::setprecision(17) << "re,im,absR\n";
  for (int j = 0; j < scan.n; ++j)
    for (int i = 0; i < scan.n; ++i) {
      const double v = scan.abs_r(j, i);
      os << scan.re(i) << ',' << scan.im(j) << ',';
      if (std::isinf(v))
        os << "inf";
      else
        os << v;
      os << '\n';
    }
  return os.str();
}

std::string boundary_csv(const StabilityScan& scan) {
  std::ostringstream os;
  os << std::setprecision(17) << "polyline,re,im\n";
  for (std::size_t l = 0; l < scan.boundary.size(); ++l)
    for (const Point& p : scan.boundary[l]) os << l << ',' << p.re << ',' << p.im << '\n';
  return os.str();
}

std::string region_svg(const StabilityScan& scan, const std::string& title) {
  const Window& w = scan.window;
  const double width = 600.0;
  const double height = width * (w.im_max - w.im_min) / (w.re_max - w.re_min);
  const auto px = [&](double re) { return (re - w.re_min) / (w.re_max - w.re_min) * width; };
  const auto py = [&](double im) { return (w.im_max - im) / (w.im_max - w.im_min) * height; };
  const double cw = width / (scan.n - 1), ch = height / (scan.n - 1);

  std::ostringstream os;
  os << std::fixed << std::setprecision(2);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
     << height + 24 << "\" viewBox=\"0 -24 " << width << ' ' << height + 24 << "\">\n";
  os << "<text x=\"4\" y=\"-8\" font-family=\"sans-serif\" font-size=\"14\">" << title
     << "</text>\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height
     << "\" fill=\"white\" stroke=\"black\"/>\n";
  os << "<g fill=\"#c8c8c8\" stroke=\"none\">\n";
  for (int j = 0; j < scan.n; ++j)
    for (int i = 0; i < scan.n; ++i)
      if (!(scan.abs_r(j, i) <= 1.0))
        os << "<rect x=\"" << px(scan.re(i)) - cw / 2 << "\" y=\"" << py(scan.im(j)) - ch / 2
           << "\" width=\"" << cw << "\" height=\"" << ch << "\"/>\n";
  os << "</g>\n";
  if (w.re_min < 0 && w.re_max > 0)
    os << "<line x1=\"" << px(0) << "\" y1=\"0\" x2=\"" << px(0) << "\" y2=\"" << height
       << "\" stroke=\"gray\"/>\n";
  if (w.im_min < 0 && w.im_max > 0)
    os << "<line x1=\"0\" y1=\"" << py(0) << "\" x2=\"" << width << "\" y2=\"" << py(0)
       << "\" stroke=\"gray\"/>\n";
  for (const Polyline& line : scan.boundary) {
    os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1.5\" points=\"";
    for (const Point& p : line) os << px(p.re) << ',' << py(p.im) << ' ';
    os << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace indc
