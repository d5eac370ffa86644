// SPDX-License-Identifier: Apache-2.0
#include "indc/solver.hpp"

#include "indc/errors.hpp"

#include <cmath>
#include <string>

namespace indc {

bool IndcScheme::warning() const {
  for (const auto& t : methods) {
    if (!is_stiffly_accurate(t) || !has_invertible_A(t)) return true;
  }
  return false;
}

IndcScheme make_scheme(int M, std::vector<ButcherTableau> methods) {
  if (M < 1 || M > 12)
    throw usage_error("M must lie in [1, 12], got " + std::to_string(M));
  if (methods.empty()) throw usage_error("a scheme needs a prediction method");
  for (const auto& t : methods) validate(t);
  IndcScheme scheme;
  scheme.M = M;
  scheme.methods = std::move(methods);
  return scheme;
}

IndcScheme uniform_scheme(const ButcherTableau& t, int M, int K) {
  if (K < 0) throw usage_error("K must be non-negative");
  return make_scheme(M, std::vector<ButcherTableau>(K + 1, t));
}

namespace {

enum class OutputRule { last_stage, inverse_weights, direct };

struct LoopTableau {
  const ButcherTableau& t;
  OutputRule rule;
  Vector v;  ///< A^{-T} b for the inverse-weights rule

  explicit LoopTableau(const ButcherTableau& tab) : t(tab) {
    if (is_stiffly_accurate(t)) {
      rule = OutputRule::last_stage;
    } else if (has_invertible_A(t)) {
      rule = OutputRule::inverse_weights;
      v = t.A.transpose().partialPivLu().solve(t.b);
    } else {
      rule = OutputRule::direct;
    }
  }
};

bool out_of_bounds(const Vector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v(i)) || std::abs(v(i)) > divergence_bound) return true;
  }
  return false;
}

// One loop (prediction when `previous` is null) across the M substeps.
StepState run_loop(const SppProblem& p, const IndcGrid& grid,
                   const ButcherTableau& tab, const StageOperators* ops,
                   const StepState* previous, const Vector& y_in,
                   const Vector& z_in, double t_n, double H,
                   const NewtonOptions& opts, StepContext ctx) {
  if (grid.include_left())
    throw usage_error("the solver does not support stencils with the left endpoint");
  if (!(H > 0.0) || !std::isfinite(H)) throw usage_error("H must be positive");
  if (!y_in.allFinite() || !z_in.allFinite())
    throw divergence_error("non-finite step input", ctx.step, previous ? previous->loop + 1 : 0, 0);

  const LoopTableau lt(tab);
  const int M = grid.M();
  const int s = tab.stages();
  const int dy = p.dim_y;
  const int dz = p.dim_z;
  const int n = dy + dz;
  const double h = H / M;
  const double eps = p.eps;
  const Matrix& A = tab.A;

  StepState st;
  st.loop = previous ? previous->loop + 1 : 0;
  st.y.resize(dy, M + 1);
  st.z.resize(dz, M + 1);
  st.f.resize(dy, M + 1);
  st.g.resize(dz, M + 1);
  st.Y.resize(dy, s * M);
  st.Z.resize(dz, s * M);
  st.y.col(0) = y_in;
  st.z.col(0) = z_in;
  st.f.col(0) = p.f(y_in, z_in, t_n);
  st.g.col(0) = p.g(y_in, z_in, t_n);

  // Previous-loop samples on the stencil tau_1..tau_M.
  Matrix fbar, gbar, ybar, zbar;
  if (previous) {
    fbar = previous->f.rightCols(M);
    gbar = previous->g.rightCols(M);
    ybar = previous->y.rightCols(M);
    zbar = previous->z.rightCols(M);
  }

  Vector weights(n * s);
  for (int i = 0; i < s; ++i) {
    weights.segment(i * n, dy).setOnes();
    weights.segment(i * n + dy, dz).setConstant(1.0 / (eps + h));
  }

  for (int m = 0; m < M; ++m) {
    const double tm = t_n + m * h;
    const Vector ym = st.y.col(m);
    const Vector zm = st.z.col(m);

    // Explicit quadrature parts of the stage equations, one column per stage.
    Matrix qy = Matrix::Zero(dy, s), qz = Matrix::Zero(dz, s);
    Matrix SfT, SgT;
    Vector Sf = Vector::Zero(dy), Sg = Vector::Zero(dz);
    if (previous) {
      const auto Sc = ops->Sc.middleRows(m * s, s);
      const auto Pc = ops->Pc.middleRows(m * s, s);
      SfT = fbar * Sc.transpose();
      SgT = gbar * Sc.transpose();
      qy = h * (SfT - fbar * Pc.transpose() * A.transpose());
      qz = h * (SgT - gbar * Pc.transpose() * A.transpose());
      Sf = fbar * grid.S().row(m).transpose();
      Sg = gbar * grid.S().row(m).transpose();
    }

    Vector guess(n * s);
    if (previous) {
      const auto Pc = ops->Pc.middleRows(m * s, s);
      const Matrix Yg = ybar * Pc.transpose();
      const Matrix Zg = zbar * Pc.transpose();
      for (int i = 0; i < s; ++i) {
        guess.segment(i * n, dy) = Yg.col(i);
        guess.segment(i * n + dy, dz) = Zg.col(i);
      }
    } else {
      for (int i = 0; i < s; ++i) {
        guess.segment(i * n, dy) = ym;
        guess.segment(i * n + dy, dz) = zm;
      }
    }

    const auto stage_time = [&](int i) { return tm + tab.c(i) * h; };

    const auto residual = [&](const Vector& X) {
      Matrix F(dy, s), G(dz, s);
      for (int j = 0; j < s; ++j) {
        const Vector Yj = X.segment(j * n, dy);
        const Vector Zj = X.segment(j * n + dy, dz);
        F.col(j) = p.f(Yj, Zj, stage_time(j));
        G.col(j) = p.g(Yj, Zj, stage_time(j));
      }
      const Matrix FA = h * F * A.transpose();
      const Matrix GA = h * G * A.transpose();
      Vector r(n * s);
      for (int i = 0; i < s; ++i) {
        r.segment(i * n, dy) = X.segment(i * n, dy) - ym - qy.col(i) - FA.col(i);
        r.segment(i * n + dy, dz) =
            eps * (X.segment(i * n + dy, dz) - zm) - qz.col(i) - GA.col(i);
      }
      return r;
    };

    const auto jacobian = [&](const Vector& X) {
      Matrix J = Matrix::Zero(n * s, n * s);
      for (int j = 0; j < s; ++j) {
        const JacobianBlocks b =
            p.jacobian(X.segment(j * n, dy), X.segment(j * n + dy, dz), stage_time(j));
        Matrix Jj(n, n);
        Jj << b.fy, b.fz, b.gy, b.gz;
        for (int i = 0; i < s; ++i) {
          if (A(i, j) != 0.0) J.block(i * n, j * n, n, n) = -h * A(i, j) * Jj;
        }
      }
      for (int i = 0; i < s; ++i) {
        for (int d = 0; d < dy; ++d) J(i * n + d, i * n + d) += 1.0;
        for (int d = 0; d < dz; ++d) J(i * n + dy + d, i * n + dy + d) += eps;
      }
      return J;
    };

    NewtonResult nr;
    try {
      nr = newton_solve(residual, jacobian, guess, opts, weights);
    } catch (const newton_error& e) {
      throw step_error(std::string(e.what()) + " (step " + std::to_string(ctx.step) +
                           ", loop " + std::to_string(st.loop) + ", substep " +
                           std::to_string(m) + ")",
                       ctx.step, st.loop, m, e.residual());
    }
    st.newton_iterations += nr.iterations;
    st.max_residual = std::max(st.max_residual, nr.residual);

    Matrix Ys(dy, s), Zs(dz, s);
    for (int i = 0; i < s; ++i) {
      Ys.col(i) = nr.x.segment(i * n, dy);
      Zs.col(i) = nr.x.segment(i * n + dy, dz);
    }
    st.Y.middleCols(m * s, s) = Ys;
    st.Z.middleCols(m * s, s) = Zs;

    Vector ynext, znext;
    switch (lt.rule) {
      case OutputRule::last_stage:
        ynext = Ys.col(s - 1);
        znext = Zs.col(s - 1);
        break;
      case OutputRule::inverse_weights: {
        // h*dK = (Y - y_m 1^T - h Sc f^) A^{-T}, and likewise for eps*Z.
        const Matrix dY = Ys.colwise() - ym;
        const Matrix dZ = Zs.colwise() - zm;
        ynext = ym + dY * lt.v;
        znext = zm + dZ * lt.v;
        if (previous) {
          ynext += h * (Sf - SfT * lt.v);
          znext += (h / eps) * (Sg - SgT * lt.v);
        }
        break;
      }
      case OutputRule::direct: {
        Matrix F(dy, s), G(dz, s);
        for (int j = 0; j < s; ++j) {
          F.col(j) = p.f(Ys.col(j), Zs.col(j), stage_time(j));
          G.col(j) = p.g(Ys.col(j), Zs.col(j), stage_time(j));
        }
        if (previous) {
          const auto Pc = ops->Pc.middleRows(m * s, s);
          F -= fbar * Pc.transpose();
          G -= gbar * Pc.transpose();
        }
        ynext = ym + h * (Sf + F * tab.b);
        znext = zm + (h / eps) * (Sg + G * tab.b);
        break;
      }
    }

    if (out_of_bounds(ynext) || out_of_bounds(znext))
      throw divergence_error("solution left the bound " + std::to_string(divergence_bound) +
                                 " (step " + std::to_string(ctx.step) + ", loop " +
                                 std::to_string(st.loop) + ", substep " + std::to_string(m) + ")",
                             ctx.step, st.loop, m);

    const double tnext = t_n + (m + 1) * h;
    st.y.col(m + 1) = ynext;
    st.z.col(m + 1) = znext;
    st.f.col(m + 1) = p.f(ynext, znext, tnext);
    st.g.col(m + 1) = p.g(ynext, znext, tnext);
  }
  return st;
}

}  // namespace

StepState predict(const SppProblem& p, const IndcGrid& grid,
                  const ButcherTableau& t, const Vector& y_in,
                  const Vector& z_in, double t_n, double H,
                  const NewtonOptions& opts, StepContext ctx) {
  return run_loop(p, grid, t, nullptr, nullptr, y_in, z_in, t_n, H, opts, ctx);
}

StepState correct(const SppProblem& p, const IndcGrid& grid,
                  const StageOperators& ops, const ButcherTableau& t,
                  const StepState& previous, const Vector& y_in,
                  const Vector& z_in, double t_n, double H,
                  const NewtonOptions& opts, StepContext ctx) {
  if (previous.y.cols() != grid.M() + 1 || previous.z.cols() != grid.M() + 1)
    throw usage_error("previous loop state does not match the grid");
  if (ops.stages != t.stages() || ops.Sc.rows() != t.stages() * grid.M())
    throw usage_error("stage operators do not match the tableau");
  return run_loop(p, grid, t, &ops, &previous, y_in, z_in, t_n, H, opts, ctx);
}

StepState correct(const SppProblem& p, const IndcGrid& grid,
                  const ButcherTableau& t, const StepState& previous,
                  const Vector& y_in, const Vector& z_in, double t_n, double H,
                  const NewtonOptions& opts, StepContext ctx) {
  const StageOperators ops = stage_operators(grid, t);
  return correct(p, grid, ops, t, previous, y_in, z_in, t_n, H, opts, ctx);
}

std::pair<Vector, Vector> irk_step(const SppProblem& p, const ButcherTableau& t,
                                   const Vector& y_in, const Vector& z_in,
                                   double t_n, double H,
                                   const NewtonOptions& opts) {
  const IndcGrid grid = build_grid(1);
  const StepState st = predict(p, grid, t, y_in, z_in, t_n, H, opts);
  return {st.y.col(1), st.z.col(1)};
}

SolveResult solve(const SppProblem& p, const IndcScheme& scheme, double T,
                  int n_steps, const SolveOptions& opts) {
  if (!(T > 0.0)) throw usage_error("T must be positive");
  if (n_steps < 1) throw usage_error("n_steps must be >= 1");
  if (scheme.methods.empty()) throw usage_error("scheme has no methods");

  const IndcGrid grid = build_grid(scheme.M);
  std::vector<StageOperators> ops;
  ops.reserve(scheme.methods.size());
  for (const auto& t : scheme.methods) ops.push_back(stage_operators(grid, t));

  const double H = T / n_steps;
  SolveResult out;
  out.warning = scheme.warning();
  out.times.push_back(p.t0);
  out.y.push_back(p.y0);
  out.z.push_back(p.z0);

  const auto record = [&](const StepState& st, int step, double t_n) {
    for (int node = 0; node <= scheme.M; ++node) {
      out.trace.push_back({step, node, st.loop, t_n + node * H / scheme.M,
                           st.y.col(node), st.z.col(node)});
    }
  };

  Vector y = p.y0, z = p.z0;
  for (int step = 0; step < n_steps; ++step) {
    const double t_n = p.t0 + step * H;
    const StepContext ctx{step};
    StepState st = predict(p, grid, scheme.methods[0], y, z, t_n, H, scheme.newton, ctx);
    out.newton_iterations += st.newton_iterations;
    if (opts.record_trace) record(st, step, t_n);
    for (int k = 1; k <= scheme.K(); ++k) {
      st = correct(p, grid, ops[k], scheme.methods[k], st, y, z, t_n, H, scheme.newton, ctx);
      out.newton_iterations += st.newton_iterations;
      if (opts.record_trace) record(st, step, t_n);
    }
    y = st.y.col(scheme.M);
    z = st.z.col(scheme.M);
    out.times.push_back(p.t0 + (step + 1) * H);
    out.y.push_back(y);
    out.z.push_back(z);
  }
  return out;
}

}  // namespace indc
