#pragma once

// Weighted Levenberg-Marquardt fit of F(i) = A alpha^i + B and the
// error metrics derived from alpha.

#include <span>
#include <string>

#include <Eigen/Dense>

namespace rbsim {

struct DecayParams {
  double a = 0.0;
  double b = 0.0;
  double alpha = 0.0;
};

double decay_model(double length, const DecayParams& p);
// (dF/dA, dF/dB, dF/dalpha) at `length`.
Eigen::Vector3d decay_jacobian(double length, const DecayParams& p);

struct FitResult {
  DecayParams params;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double sigma_alpha = 0.0;
  double chi2 = 0.0;
  double chi2_red = 0.0;
  int iterations = 0;
  bool converged = false;
  // Data with zero dynamic range; alpha is reported as 1.
  bool degenerate = false;
  std::string diagnostic;

  bool alpha_in_range() const { return params.alpha > 0.0 && params.alpha <= 1.0; }
  bool accepted() const { return converged && alpha_in_range(); }
};

struct FitOptions {
  double b0 = 0.25;  // d = 4 asymptote; 0.5 for single-qubit observables
  int max_iterations = 200;
  double rel_tolerance = 1e-10;
};

// Requires at least four points and strictly positive errors
// (ValidationError otherwise). 1-sigma half-widths come from the inverse
// normal matrix scaled by the reduced chi-square.
FitResult fit_decay(std::span<const double> lengths, std::span<const double> means,
                    std::span<const double> errors, const FitOptions& options = {});

// r = (1 - alpha)(1 - 1/d), d in {2, 4}.
double error_per_clifford(double alpha, int d);

struct Estimate {
  double value = 0.0;
  double sigma = 0.0;
  // Set when the estimate is statistically possible but physically suspect.
  bool warning = false;
};

Estimate error_per_clifford(double alpha, double sigma_alpha, int d);
// r_C = (d - 1)(1 - alpha_c / alpha) / d with first-order error propagation.
Estimate interleaved_error(double alpha, double sigma_alpha, double alpha_c, double sigma_alpha_c, int d);
double interleaved_error(double alpha, double alpha_c, int d);
// delta_alpha = a12 - a1_2 * a2_1.
Estimate delta_alpha(double a12, double sigma_a12, double a1_2, double sigma_a1_2, double a2_1,
                     double sigma_a2_1);
double delta_alpha(double a12, double a1_2, double a2_1);

}  // namespace rbsim
