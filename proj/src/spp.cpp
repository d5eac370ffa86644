// SPDX-License-Identifier: Apache-2.0
#include "indc/spp.hpp"

#include "indc/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace indc {

namespace {

Vector scalar(double v) {
  Vector out(1);
  out << v;
  return out;
}

}  // namespace

SppProblem scalar_linear(double eps) {
  if (!(eps > 0.0)) throw usage_error("eps must be positive");
  SppProblem p;
  p.name = "scalar";
  p.dim_y = 0;
  p.dim_z = 1;
  p.eps = eps;
  p.f = [](const Vector&, const Vector&, double) { return Vector(0); };
  p.g = [](const Vector&, const Vector& z, double t) {
    return scalar(-z(0) + std::cos(t));
  };
  p.jacobian = [](const Vector&, const Vector&, double) {
    JacobianBlocks j;
    j.fy = Matrix(0, 0);
    j.fz = Matrix(0, 1);
    j.gy = Matrix(1, 0);
    j.gz = Matrix::Constant(1, 1, -1.0);
    return j;
  };
  p.y0 = Vector(0);
  p.z0 = scalar(1.0 / (1.0 + eps * eps));
  const double C = p.z0(0) - 1.0 / (1.0 + eps * eps);
  p.exact = [eps, C](double t) {
    const double smooth = (std::cos(t) + eps * std::sin(t)) / (1.0 + eps * eps);
    return std::make_pair(Vector(0), scalar(smooth + C * std::exp(-t / eps)));
  };
  return p;
}

SppProblem van_der_pol(double eps) {
  if (!(eps > 0.0)) throw usage_error("eps must be positive");
  SppProblem p;
  p.name = "vdp";
  p.dim_y = 1;
  p.dim_z = 1;
  p.eps = eps;
  p.f = [](const Vector&, const Vector& z, double) { return scalar(z(0)); };
  p.g = [](const Vector& y, const Vector& z, double) {
    return scalar((1.0 - y(0) * y(0)) * z(0) - y(0));
  };
  p.jacobian = [](const Vector& y, const Vector& z, double) {
    JacobianBlocks j;
    j.fy = Matrix::Zero(1, 1);
    j.fz = Matrix::Constant(1, 1, 1.0);
    j.gy = Matrix::Constant(1, 1, -2.0 * y(0) * z(0) - 1.0);
    j.gz = Matrix::Constant(1, 1, 1.0 - y(0) * y(0));
    return j;
  };
  p.y0 = scalar(2.0);
  p.z0 = scalar(-2.0 / 3.0 + (10.0 / 81.0) * eps - (292.0 / 2187.0) * eps * eps);
  return p;
}

SppProblem linear_decay(double eps) {
  if (!(eps > 0.0)) throw usage_error("eps must be positive");
  SppProblem p;
  p.name = "decay";
  p.dim_y = 1;
  p.dim_z = 1;
  p.eps = eps;
  p.f = [](const Vector&, const Vector&, double) { return scalar(0.0); };
  p.g = [](const Vector&, const Vector& z, double) { return scalar(-z(0)); };
  p.jacobian = [](const Vector&, const Vector&, double) {
    JacobianBlocks j;
    j.fy = Matrix::Zero(1, 1);
    j.fz = Matrix::Zero(1, 1);
    j.gy = Matrix::Zero(1, 1);
    j.gz = Matrix::Constant(1, 1, -1.0);
    return j;
  };
  p.y0 = scalar(0.0);
  p.z0 = scalar(1.0);
  p.exact = [eps](double t) {
    return std::make_pair(scalar(0.0), scalar(std::exp(-t / eps)));
  };
  return p;
}

SppProblem dahlquist(double lambda) {
  SppProblem p;
  p.name = "dahlquist";
  p.dim_y = 1;
  p.dim_z = 0;
  p.eps = 1.0;
  p.f = [lambda](const Vector& y, const Vector&, double) { return Vector(lambda * y); };
  p.g = [](const Vector&, const Vector&, double) { return Vector(0); };
  p.jacobian = [lambda](const Vector&, const Vector&, double) {
    JacobianBlocks j;
    j.fy = Matrix::Constant(1, 1, lambda);
    j.fz = Matrix(1, 0);
    j.gy = Matrix(0, 1);
    j.gz = Matrix(0, 0);
    return j;
  };
  p.y0 = scalar(1.0);
  p.z0 = Vector(0);
  p.exact = [lambda](double t) {
    return std::make_pair(scalar(std::exp(lambda * t)), Vector(0));
  };
  return p;
}

SppProblem complex_dahlquist(double re, double im) {
  Matrix L(2, 2);
  L << re, -im,
       im, re;
  SppProblem p;
  p.name = "complex-dahlquist";
  p.dim_y = 2;
  p.dim_z = 0;
  p.eps = 1.0;
  p.f = [L](const Vector& y, const Vector&, double) { return Vector(L * y); };
  p.g = [](const Vector&, const Vector&, double) { return Vector(0); };
  p.jacobian = [L](const Vector&, const Vector&, double) {
    JacobianBlocks j;
    j.fy = L;
    j.fz = Matrix(2, 0);
    j.gy = Matrix(0, 2);
    j.gz = Matrix(0, 0);
    return j;
  };
  Vector y0(2);
  y0 << 1.0, 0.0;
  p.y0 = y0;
  p.z0 = Vector(0);
  p.exact = [re, im](double t) {
    Vector y(2);
    y << std::exp(re * t) * std::cos(im * t), std::exp(re * t) * std::sin(im * t);
    return std::make_pair(y, Vector(0));
  };
  return p;
}

const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names{"scalar", "vdp", "decay", "dahlquist"};
  return names;
}

SppProblem problem_by_name(std::string_view name, double eps) {
  std::string key(name);
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (key == "scalar" || key == "scalar_linear" || key == "scalar-linear")
    return scalar_linear(eps);
  if (key == "vdp" || key == "vanderpol" || key == "van_der_pol")
    return van_der_pol(eps);
  if (key == "decay") return linear_decay(eps);
  if (key == "dahlquist" || key == "linear") return dahlquist(-1.0);
  std::string known;
  for (const auto& n : problem_names()) known += (known.empty() ? "" : ", ") + n;
  throw usage_error("unknown problem '" + key + "'; known problems: " + known);
}

double jacobian_fd_deviation(const SppProblem& p, const Vector& y,
                             const Vector& z, double t) {
  const JacobianBlocks J = p.jacobian(y, z, t);
  double worst = 0.0;
  const auto compare = [&worst](const Matrix& analytic, const Matrix& fd) {
    for (Eigen::Index i = 0; i < fd.rows(); ++i) {
      for (Eigen::Index j = 0; j < fd.cols(); ++j) {
        const double scale = std::max(1.0, std::abs(fd(i, j)));
        worst = std::max(worst, std::abs(analytic(i, j) - fd(i, j)) / scale);
      }
    }
  };
  const auto column = [&](const SppProblem::Rhs& fn, bool wrt_y, int j) {
    Vector yp = y, ym = y, zp = z, zm = z;
    double step;
    if (wrt_y) {
      step = 1e-6 * std::max(1.0, std::abs(y(j)));
      yp(j) += step;
      ym(j) -= step;
    } else {
      step = 1e-6 * std::max(1.0, std::abs(z(j)));
      zp(j) += step;
      zm(j) -= step;
    }
    return Vector((fn(yp, zp, t) - fn(ym, zm, t)) / (2.0 * step));
  };
  const auto fd_block = [&](const SppProblem::Rhs& fn, int rows, bool wrt_y) {
    const int cols = wrt_y ? p.dim_y : p.dim_z;
    Matrix out(rows, cols);
    for (int j = 0; j < cols; ++j) out.col(j) = column(fn, wrt_y, j);
    return out;
  };
  compare(J.fy, fd_block(p.f, p.dim_y, true));
  compare(J.fz, fd_block(p.f, p.dim_y, false));
  compare(J.gy, fd_block(p.g, p.dim_z, true));
  compare(J.gz, fd_block(p.g, p.dim_z, false));
  return worst;
}

Vector reduced_resolvent(const SppProblem& p, const Vector& y, double t,
                         std::optional<Vector> guess,
                         const ResolventOptions& opts) {
  Vector z = guess ? *guess : p.z0;
  Vector r = p.g(y, z, t);
  double norm = r.lpNorm<Eigen::Infinity>();
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    if (norm <= opts.tol) return z;
    const Matrix gz = p.jacobian(y, z, t).gz;
    Eigen::PartialPivLU<Matrix> lu(gz);
    if (!(lu.rcond() > 1e-14))
      throw newton_error("reduced resolvent: g_z is singular", norm, iter);
    const Vector dz = lu.solve(-r);
    // Halve the step until the residual decreases.
    double lambda = 1.0;
    for (int k = 0; k < 30; ++k) {
      const Vector trial = z + lambda * dz;
      const Vector rt = p.g(y, trial, t);
      const double nt = rt.lpNorm<Eigen::Infinity>();
      if (std::isfinite(nt) && (nt < norm || k == 29)) {
        z = trial;
        r = rt;
        norm = nt;
        break;
      }
      lambda *= 0.5;
    }
  }
  if (norm <= opts.tol) return z;
  throw newton_error("reduced resolvent did not converge in " +
                         std::to_string(opts.max_iter) + " iterations",
                     norm, opts.max_iter);
}

}  // namespace indc
