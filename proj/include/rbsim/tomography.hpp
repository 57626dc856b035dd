#pragma once

// Simulated two-qubit process tomography: 36 product preparations, 36
// measurement pre-rotations, linear-inversion PTM reconstruction and a
// projection onto completely positive trace-preserving maps.

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/device.hpp"
#include "rbsim/pauli.hpp"

namespace rbsim {

// {I, X_pi, X_+pi/2, X_-pi/2, Y_+pi/2, Y_-pi/2}
inline constexpr std::array<Gate1, 6> kTomographyRotations = {Gate1::I,   Gate1::Xpi, Gate1::Xp2,
                                                              Gate1::Xm2, Gate1::Yp2, Gate1::Ym2};
inline constexpr int kTomographySettings = 36;

struct TomographySettings {
  std::optional<int> shots;  // nullopt: exact probabilities
  std::uint64_t seed = 1;
};

// Two-qubit rotation for setting index 6 * a + b.
ComplexMatrix tomography_rotation(int setting);

struct TomographyRecord {
  // probabilities[prep][meas] over outcomes {00, 01, 10, 11}
  std::vector<std::vector<std::array<double, 4>>> probabilities;
};

// Requires a trace-preserving channel (first PTM row (1, 0, ..., 0)).
TomographyRecord simulate_qpt(const Ptm& channel, const TomographySettings& settings, const SpamModel& spam);

// Least-squares PTM from the record, assuming ideal preparation and
// measurement frames.
Ptm linear_inversion_ptm(const TomographyRecord& record);

struct ProjectionResult {
  Ptm ptm;
  int iterations = 0;
  bool converged = false;
  double min_eigenvalue = 0.0;  // of the output Choi matrix
  double tp_residual = 0.0;     // max |Tr_out(chi) - I/4|
};

struct ProjectionOptions {
  double tolerance = 1e-10;  // Frobenius change between iterates
  int max_iterations = 10000;
};

// Dykstra alternating projections in Choi space between the PSD cone and
// the trace-preservation affine subspace.
ProjectionResult project_cptp(const Ptm& r, const ProjectionOptions& options = {});

struct ChoiResiduals {
  double min_eigenvalue = 0.0;
  double tp_residual = 0.0;
};
ChoiResiduals choi_residuals(const Ptm& r);

struct QptReport {
  double raw_fidelity = 0.0;
  double projected_fidelity = 0.0;
  ChoiResiduals raw_residuals;
  ChoiResiduals projected_residuals;
  Ptm raw;
  Ptm projected;
  Ptm ideal;
};

QptReport qpt_report(const Ptm& r_raw, const Ptm& r_proj, const Ptm& r_ideal);

}  // namespace rbsim
