#pragma once

// Two-transmon device model: the cross-resonance drive Hamiltonian
//   H / hbar = eps * (m IX - mu ZX + eta ZI),
// the echoed ZX_{-pi/2} sequence, T1/T2 decoherence as Kraus channels,
// and a SPAM model of thermal preparation error plus readout confusion.

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/pauli.hpp"

namespace rbsim {

struct QubitParams {
  double frequency_ghz = 0.0;
  double anharmonicity_mhz = 0.0;  // stored only; qubits are two-level
  double t1_us = std::numeric_limits<double>::infinity();
  double t2_us = std::numeric_limits<double>::infinity();
};

struct DeviceParams {
  std::array<QubitParams, 2> qubits{};
  double single_gate_ns = 32.0;
  double gaussian_sigma_ns = 8.0;
  double tau2_ns = 178.0;  // duration of each CR segment

  // Drive coefficients. Only eps * mu enters the echoed gate.
  double cr_m = 1.0;
  double cr_mu = 0.05;
  double cr_eta = 0.2;
  double cr_eps = 0.0;  // rad/ns

  // Documentation only: mu = J / Delta for ideal qubits.
  std::optional<double> coupling_j_mhz;
  std::optional<double> detuning_mhz;

  // Phenomenological coherent error after each ZX_{-pi/2}:
  // exp(-i (residual_ix IX + residual_zi ZI) / 2).
  double residual_ix = 0.0;
  double residual_zi = 0.0;

  // Measured device values; eps is calibrated for tau2 = 178 ns.
  static DeviceParams measured_defaults();
  // Every qubit with T1 = T2 = infinity.
  static DeviceParams noiseless();

  double cr_rate() const { return cr_eps * cr_mu; }
  // Wall-clock time of the echoed gate, 2 tau2 + 2 single-qubit pulses.
  double zx_gate_ns() const { return 2.0 * tau2_ns + 2.0 * single_gate_ns; }
  double layer_ns(const Layer& layer) const { return layer.entangling ? zx_gate_ns() : single_gate_ns; }

  // Copy with tau2 replaced and eps recalibrated so the echo yields ZX_{-pi/2}.
  DeviceParams with_tau2(double tau2) const;
  // Copy with T2 = 2 T1 on both qubits.
  DeviceParams coherence_limited() const;

  // Throws ValidationError naming the offending field.
  void validate() const;
};

// eps * mu satisfying 4 eps mu tau2 = pi / 2.
double calibrated_cr_rate(double tau2_ns);
// tau2 satisfying 4 eps mu tau2 = pi / 2.
double calibrated_tau2(double cr_rate);

// sign = +1 or -1 flips the IX and ZX terms; the Stark term ZI does not flip.
ComplexMatrix cr_hamiltonian(const DeviceParams& p, int sign);

// Single CR pulse of (effective) duration tau, optionally bracketed by X_pi on
// the control. Returns the target's ground-state population per tau.
std::vector<double> cr_rabi_sweep(const DeviceParams& p, std::span<const double> taus_ns,
                                  bool control_excited);
// Same readout for the echoed sequence with tau2 = tau.
std::vector<double> echoed_rabi_sweep(const DeviceParams& p, std::span<const double> taus_ns,
                                      bool control_excited);

// exp(-i tau2 H_-) (X_pi (x) I) exp(-i tau2 H_+)
//   = (X_pi (x) I) exp(+2 i eps mu tau2 ZX).
ComplexMatrix echoed_cr_unitary(const DeviceParams& p);
// Ideal-frame unitary of one ZX layer: the echo, the closing X_pi on the
// control, and the residual coherent error. tau2 = 0 gives the ideal gate.
ComplexMatrix zx_layer_unitary(const DeviceParams& p);

struct NoiseChannel {
  std::vector<ComplexMatrix> kraus;

  Ptm ptm() const { return kraus_to_ptm(kraus); }
  // max |sum K^dagger K - I|
  double trace_preservation_defect() const;
};

// Amplitude damping (gamma = 1 - e^{-t/T1}) followed by pure dephasing
// (lambda = 1 - e^{-2t(1/T2 - 1/(2 T1))}) on one qubit; 2x2 Kraus operators.
NoiseChannel single_qubit_decoherence(double t1_us, double t2_us, double duration_ns);
// Both qubits idle for `duration_ns`; 4x4 Kraus operators.
NoiseChannel decoherence_channel(const DeviceParams& p, double duration_ns);
// Same channel with one (t1, t2) pair applied to both qubits.
NoiseChannel decoherence_channel(double t1_us, double t2_us, double duration_ns);

// Ideal layer followed by decoherence over the layer's duration.
Ptm gate_channel(const Layer& layer, const DeviceParams& p);

struct SpamModel {
  std::array<double, 2> thermal{0.0, 0.0};
  // Row = prepared outcome, column = reported outcome; order 00, 01, 10, 11.
  Eigen::Matrix4d confusion = Eigen::Matrix4d::Identity();

  static SpamModel ideal() { return {}; }
  // Symmetric per-qubit misassignment, combined as a tensor product.
  static SpamModel symmetric(double misassign_q1, double misassign_q2, double thermal_q1,
                             double thermal_q2);

  // Pauli vector of |00> with thermal excited population on each qubit.
  PauliVector initial_state() const;
  void validate() const;
};

// Multiply ideal outcome probabilities by the confusion matrix.
std::array<double, 4> apply_spam(const std::array<double, 4>& ideal, const SpamModel& s);

}  // namespace rbsim
