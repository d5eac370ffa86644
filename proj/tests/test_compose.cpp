// SPDX-License-Identifier: Apache-2.0
#include "indc/compose.hpp"
#include "indc/errors.hpp"
#include "indc/solver.hpp"
#include "indc/stability.hpp"

#include <doctest.h>

#include <random>

using namespace indc;

TEST_CASE("M = 2, K = 1 composed tableau") {
  // Stencil {1/2, 1}: alpha_1 = 2 - 2x, alpha_2 = 2x - 1.
  // int_0^{1/2}: (3/4, -1/4); int_0^1: (1, 0).
  const auto ct = compose_indc_be(2, 1);
  Matrix expected(4, 4);
  expected << 0.5, 0, 0, 0,
              0.5, 0.5, 0, 0,
              0.25, -0.25, 0.5, 0,
              0.5, -0.5, 0.5, 0.5;
  CHECK((ct.tableau.A - expected).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK((ct.tableau.b - expected.row(3).transpose()).lpNorm<Eigen::Infinity>() <= 1e-15);
  Vector c(4);
  c << 0.5, 1, 0.5, 1;
  CHECK((ct.tableau.c - c).lpNorm<Eigen::Infinity>() <= 1e-15);
  CHECK(ct.block_start(1) == 2);
  CHECK_FALSE(ct.tableau.order.has_value());
  CHECK_NOTHROW(validate(ct.tableau));
}

TEST_CASE("composed tableaus are stiffly accurate and invertible") {
  for (int M = 1; M <= 6; ++M) {
    for (int K = 1; K <= 3; ++K) {
      const auto t = compose_indc_be(M, K).tableau;
      CAPTURE(M);
      CAPTURE(K);
      CHECK(t.stages() == M * (K + 1));
      CHECK(is_stiffly_accurate(t));
      CHECK(has_invertible_A(t));
    }
  }
  CHECK_THROWS_AS(compose_indc_be(3, 0), usage_error);
  CHECK_THROWS_AS(compose_indc_be(13, 1), usage_error);
}

TEST_CASE("one composed step equals one loop-solver step") {
  for (int M : {2, 3, 4}) {
    for (int K : {1, 2, 3}) {
      CHECK(step_equivalence(van_der_pol(1e-3), M, K, 0.05) <= 1e-10);
      CHECK(step_equivalence(scalar_linear(1e-4), M, K, 0.1) <= 1e-10);
    }
  }
}

TEST_CASE("composed stability function matches the loop recursion") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> re(-50.0, 0.0), im(-50.0, 50.0);
  for (int M : {2, 4}) {
    const auto t = compose_indc_be(M, 2).tableau;
    const Amplification amp(uniform_scheme(builtin("BE"), M, 2));
    for (int n = 0; n < 20; ++n) {
      const Complex z(re(rng), im(rng));
      CHECK(std::abs(stability_function(t, z) - amp(z)) <= 1e-10);
    }
  }
}
