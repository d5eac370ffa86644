// SPDX-License-Identifier: Apache-2.0
#include "indc/errors.hpp"
#include "indc/stability.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace indc;

TEST_CASE("amplification at zero is one") {
  for (const auto& name : builtin_names()) {
    for (int M : {1, 3, 5}) {
      for (int K : {0, 1, 3}) {
        CAPTURE(name);
        CHECK(std::abs(amplification(uniform_scheme(builtin(name), M, K), 0.0) - 1.0) <= 1e-14);
      }
    }
  }
}

TEST_CASE("prediction-only amplification is the base stability function to the M-th power") {
  for (const auto& name : builtin_names()) {
    const auto t = builtin(name);
    for (const Complex z : {Complex(-3.0, 1.0), Complex(-0.5, -4.0), Complex(0.3, 0.2)}) {
      const Complex expected = std::pow(stability_function(t, z / 4.0), 4);
      CHECK(std::abs(amplification(uniform_scheme(t, 4, 0), z) - expected) <= 1e-13);
    }
  }
}

TEST_CASE("amplification agrees with the solver on y' = lambda y") {
  const double re = -2.0, im = 3.0, H = 0.3;
  const auto p = complex_dahlquist(re, im);
  const auto scheme = make_scheme(3, {builtin("RadauIIA3"), builtin("BE"), builtin("BE")});
  const auto res = solve(p, scheme, H, 1);
  const Complex R = amplification(scheme, Complex(re, im) * H);
  CHECK(std::abs(res.y_final()(0) - R.real()) <= 1e-12);
  CHECK(std::abs(res.y_final()(1) - R.imag()) <= 1e-12);
}

TEST_CASE("poles raise pole_error") {
  CHECK_THROWS_AS(amplification(uniform_scheme(builtin("BE"), 2, 0), 2.0), pole_error);
}

TEST_CASE("L-stability probe") {
  CHECK(l_stability_probe(uniform_scheme(builtin("BE"), 4, 2)).pass);
  CHECK(l_stability_probe(uniform_scheme(builtin("RadauIIA3"), 3, 1)).pass);
  CHECK_FALSE(l_stability_probe(uniform_scheme(builtin("LobattoIIIA2"), 3, 0)).pass);
  CHECK_FALSE(l_stability_probe(uniform_scheme(builtin("DIRK2-NSA"), 3, 0)).pass);
  const auto probe = l_stability_probe(uniform_scheme(builtin("BE"), 3, 2), true);
  CHECK(probe.values.size() == 4);
  CHECK_FALSE(probe.pass);
}

TEST_CASE("backward Euler boundary is the unit circle around 1") {
  const auto scan = scan_region(uniform_scheme(builtin("BE"), 1, 0), {-1.0, 3.0, -2.0, 2.0}, 201);
  REQUIRE_FALSE(scan.boundary.empty());
  std::size_t points = 0;
  for (const auto& line : scan.boundary) {
    for (const auto& pt : line) {
      CHECK(std::abs(std::hypot(pt.re - 1.0, pt.im) - 1.0) <= 2e-3);
      ++points;
    }
  }
  CHECK(points > 100);
  CHECK(scan.a_stable_sampled);
  CHECK(scan.l_stable_sampled);
  // Unstable set is the disk of area pi; stable_area counts the complement.
  const double cell = (4.0 / 200) * (4.0 / 200);
  const auto unstable = (scan.abs_r.array() > 1.0).count();
  CHECK(std::abs(unstable * cell - std::numbers::pi) <= 0.05);
  CHECK(scan.stable_area() == doctest::Approx((201 * 201 - unstable) * cell));
}

TEST_CASE("explicit-like region is not A-stable") {
  const auto scan = scan_region(uniform_scheme(builtin("DIRK2-SA"), 6, 2), {}, 64);
  CHECK_FALSE(scan.a_stable_sampled);
  CHECK(scan.abs_r.rows() == 64);
  CHECK_THROWS_AS(scan_region(uniform_scheme(builtin("BE"), 2, 0), {}, 8), usage_error);
}

TEST_CASE("marching squares traces a circle as one closed curve") {
  const int n = 41;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) xs[i] = ys[i] = -2.0 + 4.0 * i / (n - 1);
  Matrix field(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) field(j, i) = xs[i] * xs[i] + ys[j] * ys[j];
  const auto lines = marching_squares(field, xs, ys, 1.0);
  REQUIRE(lines.size() == 1);
  const auto& line = lines.front();
  CHECK(std::abs(line.front().re - line.back().re) <= 1e-12);
  CHECK(std::abs(line.front().im - line.back().im) <= 1e-12);
  for (const auto& pt : line) CHECK(std::abs(std::hypot(pt.re, pt.im) - 1.0) <= 0.01);
}

TEST_CASE("text outputs") {
  const auto scan = scan_region(uniform_scheme(builtin("BE"), 1, 0), {-1.0, 3.0, -2.0, 2.0}, 16);
  const auto csv = region_csv(scan);
  CHECK(csv.rfind("re,im,absR\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 16 * 16 + 1);
  CHECK(boundary_csv(scan).rfind("polyline,re,im\n", 0) == 0);
  const auto svg = region_svg(scan, "BE");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}
