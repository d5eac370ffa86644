// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace indc {

/// Bad arguments: unknown names, out-of-range indices, malformed specs.
class usage_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Base for failures of the numerics themselves (exit code 2 in the CLI).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// (I - zA) or a recursion stage matrix is singular at z.
class pole_error : public numerical_error {
 public:
  pole_error(const std::string& what, std::complex<double> z)
      : numerical_error(what), z_(z) {}
  std::complex<double> z() const noexcept { return z_; }

 private:
  std::complex<double> z_;
};

class newton_error : public numerical_error {
 public:
  newton_error(const std::string& what, double residual, int iterations)
      : numerical_error(what), residual_(residual), iterations_(iterations) {}
  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Newton failure inside a time step, tagged with where it happened.
class step_error : public numerical_error {
 public:
  step_error(const std::string& what, int step, int loop, int substep,
             double residual)
      : numerical_error(what),
        step_(step),
        loop_(loop),
        substep_(substep),
        residual_(residual) {}
  int step() const noexcept { return step_; }
  int loop() const noexcept { return loop_; }
  int substep() const noexcept { return substep_; }
  double residual() const noexcept { return residual_; }

 private:
  int step_, loop_, substep_;
  double residual_;
};

/// A solution component became non-finite or exceeded the blow-up bound.
class divergence_error : public numerical_error {
 public:
  divergence_error(const std::string& what, int step, int loop, int substep)
      : numerical_error(what), step_(step), loop_(loop), substep_(substep) {}
  int step() const noexcept { return step_; }
  int loop() const noexcept { return loop_; }
  int substep() const noexcept { return substep_; }

 private:
  int step_, loop_, substep_;
};

}  // namespace indc
