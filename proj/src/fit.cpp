#include "rbsim/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

double chi_square(std::span<const double> x, std::span<const double> y, std::span<const double> w,
                  const DecayParams& p) {
  double chi2 = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double r = y[k] - decay_model(x[k], p);
    chi2 += w[k] * r * r;
  }
  return chi2;
}

double initial_alpha(std::span<const double> x, std::span<const double> y, double b0, double a0) {
  const double sign = a0 < 0.0 ? -1.0 : 1.0;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double v = sign * (y[k] - b0);
    if (v <= 0.0) continue;
    const double ly = std::log(v);
    sx += x[k];
    sy += ly;
    sxx += x[k] * x[k];
    sxy += x[k] * ly;
    ++n;
  }
  const double denom = n * sxx - sx * sx;
  if (n < 2 || denom <= 0.0) return 0.9;
  const double slope = (n * sxy - sx * sy) / denom;
  return std::clamp(std::exp(slope), 0.01, 0.9999);
}

struct Descent {
  DecayParams params;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

Descent levenberg_marquardt(std::span<const double> lengths, std::span<const double> means,
                            std::span<const double> w, DecayParams p, const FitOptions& options) {
  const std::size_t n = lengths.size();
  double chi2 = chi_square(lengths, means, w, p);
  double lambda = 1e-3;
  Eigen::Matrix3d normal;
  int it = 0;
  bool converged = false;
  for (; it < options.max_iterations; ++it) {
    normal.setZero();
    Eigen::Vector3d gradient = Eigen::Vector3d::Zero();
    for (std::size_t k = 0; k < n; ++k) {
      const Eigen::Vector3d j = decay_jacobian(lengths[k], p);
      normal += w[k] * j * j.transpose();
      gradient += w[k] * (means[k] - decay_model(lengths[k], p)) * j;
    }
    if (chi2 <= 1e-28 * static_cast<double>(n)) {
      converged = true;
      break;
    }

    bool accepted = false;
    double new_chi2 = chi2;
    while (lambda < 1e16) {
      Eigen::Matrix3d damped = normal;
      damped.diagonal() *= (1.0 + lambda);
      const Eigen::Vector3d step = damped.ldlt().solve(gradient);
      const DecayParams trial{p.a + step(0), p.b + step(1), p.alpha + step(2)};
      new_chi2 = trial.alpha > 0.0 ? chi_square(lengths, means, w, trial)
                                   : std::numeric_limits<double>::infinity();
      if (std::isfinite(new_chi2) && new_chi2 <= chi2) {
        p = trial;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      // No descent direction left: chi2 is at its minimum to working precision.
      converged = true;
      break;
    }
    const double change = chi2 - new_chi2;
    chi2 = new_chi2;
    if (change <= options.rel_tolerance * std::max(chi2, 1e-300)) {
      converged = true;
      ++it;
      break;
    }
  }

  return {p, chi2, it, converged};
}

// Alpha from sum_k d_{k+1} d_k / sum_k d_k^2 over unit-spaced lengths,
// then A and B by weighted linear least squares.
std::optional<DecayParams> difference_ratio_start(std::span<const double> x, std::span<const double> y,
                                                  std::span<const double> w) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k + 2 < x.size(); ++k) {
    if (x[k + 1] - x[k] != 1.0 || x[k + 2] - x[k + 1] != 1.0) continue;
    const double d0 = y[k + 1] - y[k], d1 = y[k + 2] - y[k + 1];
    num += d1 * d0;
    den += d0 * d0;
  }
  if (!(den > 0.0) || !(num > 0.0)) return std::nullopt;
  const double alpha = num / den;
  Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
  Eigen::Vector2d v = Eigen::Vector2d::Zero();
  for (std::size_t k = 0; k < x.size(); ++k) {
    const Eigen::Vector2d row(std::pow(alpha, x[k]), 1.0);
    m += w[k] * row * row.transpose();
    v += w[k] * y[k] * row;
  }
  Eigen::FullPivLU<Eigen::Matrix2d> lu(m);
  if (!lu.isInvertible()) return std::nullopt;
  const Eigen::Vector2d ab = lu.solve(v);
  return DecayParams{ab(0), ab(1), alpha};
}

}  // namespace

double decay_model(double length, const DecayParams& p) {
  return p.a * std::pow(p.alpha, length) + p.b;
}

Eigen::Vector3d decay_jacobian(double length, const DecayParams& p) {
  const double dalpha = length == 0.0 ? 0.0 : p.a * length * std::pow(p.alpha, length - 1.0);
  return {std::pow(p.alpha, length), 1.0, dalpha};
}

FitResult fit_decay(std::span<const double> lengths, std::span<const double> means,
                    std::span<const double> errors, const FitOptions& options) {
  const std::size_t n = lengths.size();
  if (means.size() != n || errors.size() != n)
    throw ValidationError("fit_decay: lengths, means and errors differ in size");
  if (n < 4) throw ValidationError("fit_decay: need at least 4 points for 3 parameters");
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!(errors[k] > 0.0)) throw ValidationError("fit_decay: errors must be strictly positive");
    w[k] = 1.0 / (errors[k] * errors[k]);
  }

  FitResult result;
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  if (*hi - *lo < 1e-12) {
    result.params = {*lo - options.b0, options.b0, 1.0};
    result.degenerate = true;
    result.converged = true;
    result.diagnostic = "flat decay: zero dynamic range";
    return result;
  }

  DecayParams p0;
  p0.b = options.b0;
  p0.a = means[0] - options.b0;
  p0.alpha = initial_alpha(lengths, means, options.b0, p0.a);
  Descent best = levenberg_marquardt(lengths, means, w, p0, options);
  // Second start from the ratio of successive differences, which also
  // covers growing or sign-flipped decays the log-linear guess cannot.
  if (const auto alt = difference_ratio_start(lengths, means, w)) {
    const Descent other = levenberg_marquardt(lengths, means, w, *alt, options);
    if ((other.converged && !best.converged) || (other.converged == best.converged && other.chi2 < best.chi2))
      best = other;
  }
  const DecayParams p = best.params;
  const double chi2 = best.chi2;
  const int it = best.iterations;
  const bool converged = best.converged;
  Eigen::Matrix3d normal;

  // Final normal matrix at the solution.
  normal.setZero();
  for (std::size_t k = 0; k < n; ++k) {
    const Eigen::Vector3d j = decay_jacobian(lengths[k], p);
    normal += w[k] * j * j.transpose();
  }

  result.params = p;
  result.chi2 = chi2;
  result.chi2_red = chi2 / static_cast<double>(n - 3);
  result.iterations = it;
  result.converged = converged;

  Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (lu.isInvertible()) {
    const Eigen::Matrix3d cov = lu.inverse() * result.chi2_red;
    result.sigma_a = std::sqrt(std::max(0.0, cov(0, 0)));
    result.sigma_b = std::sqrt(std::max(0.0, cov(1, 1)));
    result.sigma_alpha = std::sqrt(std::max(0.0, cov(2, 2)));
  } else {
    result.diagnostic = "singular normal matrix; confidence intervals unavailable";
  }

  if (!converged) {
    std::ostringstream msg;
    msg << "no convergence after " << it << " iterations (chi2 = " << chi2 << ")";
    result.diagnostic = msg.str();
  } else if (!result.alpha_in_range()) {
    result.diagnostic = "alpha outside (0, 1]";
  }
  return result;
}

double error_per_clifford(double alpha, int d) {
  if (d != 2 && d != 4) throw ValidationError("error_per_clifford: d must be 2 or 4");
  return (1.0 - alpha) * (1.0 - 1.0 / d);
}

Estimate error_per_clifford(double alpha, double sigma_alpha, int d) {
  return {error_per_clifford(alpha, d), sigma_alpha * (1.0 - 1.0 / d), false};
}

double interleaved_error(double alpha, double alpha_c, int d) {
  if (!(alpha > 0.0)) throw ValidationError("interleaved_error: alpha must be positive");
  return (d - 1.0) * (1.0 - alpha_c / alpha) / d;
}

Estimate interleaved_error(double alpha, double sigma_alpha, double alpha_c, double sigma_alpha_c, int d) {
  Estimate e;
  e.value = interleaved_error(alpha, alpha_c, d);
  const double k = (d - 1.0) / d;
  const double d_alpha = k * alpha_c / (alpha * alpha);
  const double d_alpha_c = -k / alpha;
  e.sigma = std::hypot(d_alpha * sigma_alpha, d_alpha_c * sigma_alpha_c);
  e.warning = alpha_c > alpha;
  return e;
}

double delta_alpha(double a12, double a1_2, double a2_1) { return a12 - a1_2 * a2_1; }

Estimate delta_alpha(double a12, double sigma_a12, double a1_2, double sigma_a1_2, double a2_1,
                     double sigma_a2_1) {
  Estimate e;
  e.value = delta_alpha(a12, a1_2, a2_1);
  e.sigma = std::sqrt(sigma_a12 * sigma_a12 + std::pow(a2_1 * sigma_a1_2, 2) + std::pow(a1_2 * sigma_a2_1, 2));
  return e;
}

}  // namespace rbsim
