// SPDX-License-Identifier: Apache-2.0
#include "indc/newton.hpp"

#include "indc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace indc {

namespace {

// Residuals within this many ulps of the iterate are at roundoff level.
constexpr double roundoff_factor = 16.0;
constexpr int max_polish = 3;

}  // namespace

NewtonResult newton_solve(const std::function<Vector(const Vector&)>& residual,
                          const std::function<Matrix(const Vector&)>& jacobian,
                          Vector guess, const NewtonOptions& opts,
                          const Vector& weights) {
  NewtonResult out;
  out.x = std::move(guess);

  const auto weighted_norm = [&weights](const Vector& r) {
    if (weights.size() == 0) return r.lpNorm<Eigen::Infinity>();
    return r.cwiseProduct(weights).lpNorm<Eigen::Infinity>();
  };

  Eigen::PartialPivLU<Matrix> lu;
  const auto factor = [&](const Vector& at) {
    lu.compute(jacobian(at));
    ++out.jacobian_updates;
    const double rcond = lu.rcond();
    if (!(std::isfinite(rcond) && rcond > 1e-15))
      throw newton_error("stage Jacobian is singular", out.residual, out.iterations);
  };

  Vector r = residual(out.x);
  out.residual = weighted_norm(r);
  factor(out.x);
  bool fresh = true;
  double previous = std::numeric_limits<double>::infinity();
  int polish = 0;

  while (true) {
    if (!std::isfinite(out.residual))
      throw newton_error("non-finite stage residual", out.residual, out.iterations);
    const double scale = std::max(1.0, out.x.lpNorm<Eigen::Infinity>());
    const double target = opts.tol_abs + opts.tol_rel * out.x.lpNorm<Eigen::Infinity>();
    const double floor = roundoff_factor * std::numeric_limits<double>::epsilon() * scale;
    if (out.residual <= floor) return out;
    if (out.residual <= target) {
      // Accepted; keep contracting toward roundoff while it is cheap.
      if (polish >= max_polish || out.residual > 0.25 * previous) return out;
      ++polish;
    }
    if (out.iterations >= opts.max_iter)
      throw newton_error("Newton did not converge in " + std::to_string(opts.max_iter) +
                             " iterations",
                         out.residual, out.iterations);

    out.x -= lu.solve(r);
    ++out.iterations;
    previous = out.residual;
    r = residual(out.x);
    out.residual = weighted_norm(r);

    if (out.residual > 0.5 * previous && std::isfinite(out.residual) &&
        out.residual > target) {
      if (fresh && out.residual >= previous && out.iterations > 8)
        throw newton_error("Newton iteration stagnates", out.residual, out.iterations);
      factor(out.x);
      fresh = true;
    } else {
      fresh = false;
    }
  }
}

}  // namespace indc
