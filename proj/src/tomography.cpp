#include "rbsim/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

// Pauli vectors of the ideal prepared states, one column per preparation.
Eigen::Matrix<double, 16, 36> preparation_vectors(const PauliVector& initial) {
  Eigen::Matrix<double, 16, 36> x;
  for (int s = 0; s < kTomographySettings; ++s)
    x.col(s) = unitary_to_ptm(tomography_rotation(s)) * initial;
  return x;
}

// Rows e with p = e . x / 4 for each (setting, outcome), 144 x 16.
Eigen::Matrix<double, 144, 16> measurement_vectors() {
  Eigen::Matrix<double, 144, 16> e;
  for (int s = 0; s < kTomographySettings; ++s) {
    // Outcome k after rotation U has effect U^dagger |k><k| U.
    const Ptm r = unitary_to_ptm(tomography_rotation(s));
    for (int k = 0; k < 4; ++k) {
      PauliVector projector = PauliVector::Zero();
      const double sa = (k / 2) ? -1.0 : 1.0;
      const double sb = (k % 2) ? -1.0 : 1.0;
      projector(labels::II) = 1.0;
      projector(labels::IZ) = sb;
      projector(labels::ZI) = sa;
      projector(labels::ZZ) = sa * sb;
      e.row(4 * s + k) = (r.transpose() * projector).transpose();
    }
  }
  return e;
}

ComplexMatrix psd_projection(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (m + m.adjoint()));
  const Eigen::VectorXd w = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * w.asDiagonal() * eig.eigenvectors().adjoint();
}

ComplexMatrix tp_projection(const ComplexMatrix& chi) {
  const ComplexMatrix excess = choi_input_marginal(chi) - ComplexMatrix::Identity(4, 4) / 4.0;
  return chi - kron(excess, ComplexMatrix::Identity(4, 4) / 4.0);
}

double min_eigenvalue(const ComplexMatrix& chi) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(0.5 * (chi + chi.adjoint()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff();
}

double tp_residual(const ComplexMatrix& chi) {
  return max_abs(choi_input_marginal(chi) - ComplexMatrix::Identity(4, 4) / 4.0);
}

}  // namespace

ComplexMatrix tomography_rotation(int setting) {
  if (setting < 0 || setting >= kTomographySettings) throw ValidationError("tomography setting out of range");
  return kron(gate_unitary(kTomographyRotations[setting / 6]), gate_unitary(kTomographyRotations[setting % 6]));
}

TomographyRecord simulate_qpt(const Ptm& channel, const TomographySettings& settings, const SpamModel& spam) {
  spam.validate();
  Eigen::Matrix<double, 1, 16> first_row = Eigen::Matrix<double, 1, 16>::Zero();
  first_row(0) = 1.0;
  if ((channel.row(0) - first_row).cwiseAbs().maxCoeff() > 1e-9)
    throw ValidationError("simulate_qpt: channel is not trace preserving");
  if (settings.shots && *settings.shots < 1) throw ValidationError("qpt.shots: must be positive or 'exact'");

  std::array<Ptm, kTomographySettings> rotations;
  for (int s = 0; s < kTomographySettings; ++s) rotations[s] = unitary_to_ptm(tomography_rotation(s));
  const PauliVector initial = spam.initial_state();

  std::mt19937_64 rng(settings.seed);
  TomographyRecord rec;
  rec.probabilities.assign(kTomographySettings, std::vector<std::array<double, 4>>(kTomographySettings));
  for (int prep = 0; prep < kTomographySettings; ++prep) {
    const PauliVector after = channel * (rotations[prep] * initial);
    for (int meas = 0; meas < kTomographySettings; ++meas) {
      auto probs = apply_spam(computational_probabilities(rotations[meas] * after), spam);
      if (settings.shots) {
        std::array<double, 4> weights;
        for (int k = 0; k < 4; ++k) weights[k] = std::max(0.0, probs[k]);
        std::discrete_distribution<int> outcome(weights.begin(), weights.end());
        std::array<int, 4> counts{};
        for (int n = 0; n < *settings.shots; ++n) ++counts[outcome(rng)];
        for (int k = 0; k < 4; ++k) probs[k] = static_cast<double>(counts[k]) / *settings.shots;
      }
      rec.probabilities[prep][meas] = probs;
    }
  }
  return rec;
}

Ptm linear_inversion_ptm(const TomographyRecord& record) {
  if (record.probabilities.size() != kTomographySettings)
    throw ValidationError("linear_inversion_ptm: record must hold 36 preparations");
  Eigen::Matrix<double, 144, 36> data;
  for (int prep = 0; prep < kTomographySettings; ++prep) {
    if (record.probabilities[prep].size() != kTomographySettings)
      throw ValidationError("linear_inversion_ptm: record must hold 36 measurement settings");
    for (int meas = 0; meas < kTomographySettings; ++meas)
      for (int k = 0; k < 4; ++k) data(4 * meas + k, prep) = record.probabilities[prep][meas][k];
  }

  const auto x = preparation_vectors(SpamModel::ideal().initial_state());
  const auto e = measurement_vectors();
  // data = E R X / 4; the Kronecker least-squares solution is
  // R = 4 E^+ data X^+ when E has full column rank and X full row rank.
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 144, 16>> qr_e(e);
  Eigen::ColPivHouseholderQR<Eigen::Matrix<double, 36, 16>> qr_x(x.transpose());
  if (qr_e.rank() != 16 || qr_x.rank() != 16) {
    std::ostringstream msg;
    msg << "linear_inversion_ptm: rank-deficient settings (measurement rank " << qr_e.rank()
        << ", preparation rank " << qr_x.rank() << ")";
    throw NumericalError(msg.str());
  }
  const Eigen::Matrix<double, 16, 36> left = qr_e.solve(data);                      // E^+ data
  const Eigen::Matrix<double, 16, 16> rt = qr_x.solve(left.transpose());            // X^+T (E^+ data)^T
  return 4.0 * rt.transpose();
}

ChoiResiduals choi_residuals(const Ptm& r) {
  const ComplexMatrix chi = choi_from_ptm(r);
  return {min_eigenvalue(chi), tp_residual(chi)};
}

ProjectionResult project_cptp(const Ptm& r, const ProjectionOptions& options) {
  ComplexMatrix x = choi_from_ptm(r);
  ComplexMatrix p = ComplexMatrix::Zero(16, 16);
  ComplexMatrix q = ComplexMatrix::Zero(16, 16);

  ProjectionResult result;
  const bool feasible = min_eigenvalue(x) >= -1e-12 && tp_residual(x) <= 1e-12;
  if (feasible) {
    result.converged = true;
  } else {
    for (int it = 0; it < options.max_iterations; ++it) {
      const ComplexMatrix y = psd_projection(x + p);
      p = x + p - y;
      const ComplexMatrix next = tp_projection(y + q);
      q = y + q - next;
      const double change = (next - x).norm();
      x = next;
      result.iterations = it + 1;
      if (change < options.tolerance) {
        result.converged = true;
        break;
      }
    }
    // Mixing toward I/16 is trace preserving and removes any residual
    // negative eigenvalue left by the finite iteration.
    const double lowest = min_eigenvalue(x);
    if (lowest < 0.0) {
      const double t = -lowest / (1.0 / 16.0 - lowest);
      x = (1.0 - t) * x + t * ComplexMatrix::Identity(16, 16) / 16.0;
    }
  }
  result.ptm = ptm_from_choi(x);
  if (!feasible) result.ptm.row(0) = Eigen::Matrix<double, 1, 16>::Unit(0);
  result.min_eigenvalue = min_eigenvalue(choi_from_ptm(result.ptm));
  result.tp_residual = tp_residual(choi_from_ptm(result.ptm));
  if (feasible) result.ptm = r;
  return result;
}

QptReport qpt_report(const Ptm& r_raw, const Ptm& r_proj, const Ptm& r_ideal) {
  QptReport report;
  report.raw_fidelity = avg_gate_fidelity(r_raw, r_ideal);
  report.projected_fidelity = avg_gate_fidelity(r_proj, r_ideal);
  report.raw_residuals = choi_residuals(r_raw);
  report.projected_residuals = choi_residuals(r_proj);
  report.raw = r_raw;
  report.projected = r_proj;
  report.ideal = r_ideal;
  return report;
}

}  // namespace rbsim
