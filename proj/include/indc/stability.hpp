// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "indc/quadrature.hpp"
#include "indc/solver.hpp"

#include <complex>
#include <string>
#include <vector>

namespace indc {

using Complex = std::complex<double>;

/// Amplification factor of an InDC scheme on y' = lambda y, z = lambda H.
///
/// Node values r_m of each loop are tracked on the grid. With w = z/M the
/// stage vector X of substep m solves
///
///     (I - wA) X = r_m 1 + w (Sc_m R - A Pc_m R)
///
/// where R holds the previous loop's node values on the stencil (zero for the
/// prediction). Grid and stage operators are built once per scheme.
class Amplification {
 public:
  /// `include_left` puts tau_0 into the interpolation stencil. It is a
  /// diagnostic mode only; the solver never uses it.
  explicit Amplification(IndcScheme scheme, bool include_left = false);

  /// Throws pole_error when some I - wA is numerically singular.
  Complex operator()(Complex z) const;

  const IndcScheme& scheme() const { return scheme_; }
  bool include_left() const { return grid_.include_left(); }

 private:
  IndcScheme scheme_;
  IndcGrid grid_;
  std::vector<StageOperators> ops_;
};

Complex amplification(const IndcScheme& scheme, Complex z, bool include_left = false);

struct Window {
  double re_min = -20, re_max = 5;
  double im_min = -15, im_max = 15;
};

struct Point {
  double re = 0, im = 0;
};
using Polyline = std::vector<Point>;

struct LProbe {
  std::vector<double> values;  ///< |R| at z = -1e2, -1e4, -1e6, -1e8
  double limit_estimate = 0.0; ///< last of `values`
  bool pass = false;
};

/// Pass iff the four values decrease and the last is at most 1e-5.
LProbe l_stability_probe(const Amplification& amp);
LProbe l_stability_probe(const IndcScheme& scheme, bool include_left = false);

struct StabilityScan {
  Window window;
  int n = 0;
  /// |R| sampled on an n x n grid; abs_r(j, i) is at re_i + i im_j. Poles
  /// are stored as +infinity.
  Matrix abs_r;
  std::vector<Polyline> boundary;  ///< |R| = 1 level set
  bool a_stable_sampled = false;
  bool l_stable_sampled = false;

  double re(int i) const;
  double im(int j) const;
  /// Sampled area of {|R| <= 1} inside the window: count times cell area.
  double stable_area() const;
};

/// Samples |R| over the window (in parallel, see worker_count()). n >= 16,
/// otherwise usage_error.
StabilityScan scan_region(const IndcScheme& scheme, const Window& window, int n,
                          bool include_left = false);

/// Level-set extraction of {field = level} by marching squares with linear
/// interpolation; segments are chained into polylines. field(j, i) sits at
/// (xs[i], ys[j]).
std::vector<Polyline> marching_squares(const Matrix& field, const std::vector<double>& xs,
                                       const std::vector<double>& ys, double level);

/// "re,im,absR" rows, real index fastest.
std::string region_csv(const StabilityScan& scan);
/// "polyline,re,im" rows in walk order.
std::string boundary_csv(const StabilityScan& scan);
/// Stand-alone SVG: shaded unstable samples, boundary curves and axes.
std::string region_svg(const StabilityScan& scan, const std::string& title);

}  // namespace indc
