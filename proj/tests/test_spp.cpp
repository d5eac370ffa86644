// SPDX-License-Identifier: Apache-2.0
#include "indc/errors.hpp"
#include "indc/quadrature.hpp"
#include "indc/spp.hpp"

#include <doctest.h>

#include <cmath>

using namespace indc;

namespace {

// z(t) = exp(-t/eps) z0 + (1/eps) int_0^t exp(-(t-s)/eps) cos s ds, by
// composite Gauss on panels short relative to eps.
double variation_of_constants(double eps, double z0, double t) {
  const auto rule = gauss_legendre_unit(10);
  const int panels = 400;
  const double w = t / panels;
  double sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
      const double s = (k + rule.nodes[q]) * w;
      sum += rule.weights[q] * w * std::exp(-(t - s) / eps) * std::cos(s);
    }
  }
  return std::exp(-t / eps) * z0 + sum / eps;
}

}  // namespace

TEST_CASE("scalar problem exact solution matches variation of constants") {
  for (double eps : {0.5, 0.1, 0.02}) {
    const auto p = scalar_linear(eps);
    CHECK(p.dim_y == 0);
    CHECK(p.dim_z == 1);
    for (double t : {0.1, 0.25, 0.5, 1.0}) {
      const double oracle = variation_of_constants(eps, p.z0(0), t);
      CHECK(std::abs(p.exact(t).second(0) - oracle) <= 1e-12);
    }
  }
}

TEST_CASE("scalar problem starts on the smooth manifold") {
  const double eps = 1e-3;
  const auto p = scalar_linear(eps);
  // The smooth solution satisfies eps z' = g exactly.
  for (double t : {0.0, 0.3, 0.7}) {
    const double z = p.exact(t).second(0);
    const double dz = (-std::sin(t) + eps * std::cos(t)) / (1 + eps * eps);
    CHECK(std::abs(eps * dz - p.g(Vector(0), Vector::Constant(1, z), t)(0)) <= 1e-15);
  }
}

TEST_CASE("analytic Jacobians agree with finite differences") {
  for (const auto& name : problem_names()) {
    const auto p = problem_by_name(name, 1e-3);
    CAPTURE(name);
    CHECK(jacobian_fd_deviation(p, p.y0, p.z0, p.t0) <= 1e-5);
    if (p.dim_y > 0) {
      Vector y = p.y0;
      y(0) = -0.7;
      Vector z = p.z0;
      if (p.dim_z > 0) z(0) = 1.3;
      CHECK(jacobian_fd_deviation(p, y, z, 0.4) <= 1e-5);
    }
  }
  const auto c = complex_dahlquist(-2.0, 5.0);
  CHECK(jacobian_fd_deviation(c, c.y0, c.z0, 0.0) <= 1e-5);
}

TEST_CASE("van der Pol start lies on the slow manifold") {
  // On z = h(y), eps z' = eps h'(y) z with h ~ y / (1 - y^2), so g must match
  // eps h'(y0) z0 up to O(eps^2).
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const auto p = van_der_pol(eps);
    const double y = p.y0(0), z = p.z0(0);
    const double h_prime = (1 + y * y) / ((1 - y * y) * (1 - y * y));
    const double g = p.g(p.y0, p.z0, 0.0)(0);
    CHECK(std::abs(g - eps * h_prime * z) <= 10 * eps * eps);
  }
}

TEST_CASE("reduced resolvent solves g = 0") {
  const auto p = van_der_pol(1e-6);
  const Vector z = reduced_resolvent(p, p.y0);
  CHECK(std::abs(z(0) - (-2.0 / 3.0)) <= 1e-12);
  Vector y(1);
  y << 3.0;
  CHECK(std::abs(reduced_resolvent(p, y)(0) - (-3.0 / 8.0)) <= 1e-12);

  const auto s = scalar_linear(1e-6);
  CHECK(std::abs(reduced_resolvent(s, Vector(0), 0.5)(0) - std::cos(0.5)) <= 1e-12);

  // g_z = 1 - y^2 vanishes at y = 1.
  Vector turning(1);
  turning << 1.0;
  CHECK_THROWS_AS(reduced_resolvent(p, turning), newton_error);
}

TEST_CASE("problem registry") {
  CHECK(problem_by_name("vdp", 1e-3).name == "vdp");
  CHECK(problem_by_name("scalar", 1e-3).z0(0) == doctest::Approx(1.0 / (1.0 + 1e-6)));
  CHECK(problem_by_name("dahlquist", 1.0).dim_z == 0);
  CHECK_THROWS_AS(problem_by_name("lorenz", 1e-3), usage_error);
  CHECK_THROWS_AS(scalar_linear(0.0), usage_error);
  CHECK_THROWS_AS(van_der_pol(-1.0), usage_error);
}

TEST_CASE("linear problems have exact solutions") {
  const auto d = dahlquist(-2.0);
  CHECK(d.exact(0.5).first(0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
  const auto c = complex_dahlquist(-1.0, 2.0);
  const auto e = c.exact(0.3).first;
  CHECK(e(0) == doctest::Approx(std::exp(-0.3) * std::cos(0.6)).epsilon(1e-14));
  CHECK(e(1) == doctest::Approx(std::exp(-0.3) * std::sin(0.6)).epsilon(1e-14));
  const auto decay = linear_decay(1e-2);
  CHECK(decay.exact(0.05).second(0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-14));
}
