#include "rbsim/device.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

using std::numbers::pi;

ComplexMatrix control_flip() { return kron(rotation(1, 0, 0, pi), ComplexMatrix::Identity(2, 2)); }

double target_ground_population(const ComplexMatrix& u, bool control_excited) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
  psi(control_excited ? 2 : 0) = 1.0;
  psi = u * psi;
  return std::norm(psi(0)) + std::norm(psi(2));
}

void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

}  // namespace

DeviceParams DeviceParams::measured_defaults() {
  DeviceParams p;
  p.qubits[0] = {3.2324, -331.0, 11.6, 7.1};
  p.qubits[1] = {3.2945, -216.0, 9.1, 5.6};
  p.tau2_ns = 178.0;
  p.cr_eps = calibrated_cr_rate(p.tau2_ns) / p.cr_mu;
  return p;
}

DeviceParams DeviceParams::noiseless() {
  DeviceParams p = measured_defaults();
  for (auto& q : p.qubits) {
    q.t1_us = std::numeric_limits<double>::infinity();
    q.t2_us = std::numeric_limits<double>::infinity();
  }
  return p;
}

DeviceParams DeviceParams::with_tau2(double tau2) const {
  DeviceParams p = *this;
  p.tau2_ns = tau2;
  if (tau2 > 0.0) {
    require(cr_mu != 0.0, "device.cr_mu: must be nonzero to calibrate the echoed gate");
    p.cr_eps = calibrated_cr_rate(tau2) / cr_mu;
  }
  return p;
}

DeviceParams DeviceParams::coherence_limited() const {
  DeviceParams p = *this;
  for (auto& q : p.qubits) q.t2_us = 2.0 * q.t1_us;
  return p;
}

void DeviceParams::validate() const {
  for (int k = 0; k < 2; ++k) {
    const auto& q = qubits[k];
    const std::string prefix = "device.qubit" + std::to_string(k + 1) + ".";
    require(q.t1_us > 0.0, prefix + "t1_us: must be positive");
    require(q.t2_us > 0.0, prefix + "t2_us: must be positive");
    require(q.t2_us <= 2.0 * q.t1_us * (1.0 + 1e-12), prefix + "t2_us: T2 must not exceed 2*T1");
  }
  require(single_gate_ns > 0.0, "device.single_gate_ns: must be positive");
  require(gaussian_sigma_ns > 0.0, "device.sigma_ns: must be positive");
  require(tau2_ns >= 0.0, "device.tau2_ns: must be non-negative");
  require(std::isfinite(cr_eps) && std::isfinite(cr_mu) && std::isfinite(cr_m) && std::isfinite(cr_eta),
          "device.cr_*: coefficients must be finite");
}

double calibrated_cr_rate(double tau2_ns) {
  require(tau2_ns > 0.0, "calibration needs tau2 > 0");
  return pi / (8.0 * tau2_ns);
}

double calibrated_tau2(double cr_rate) {
  require(cr_rate > 0.0, "calibration needs eps*mu > 0");
  return pi / (8.0 * cr_rate);
}

ComplexMatrix cr_hamiltonian(const DeviceParams& p, int sign) {
  require(sign == 1 || sign == -1, "cr_hamiltonian: sign must be +1 or -1");
  using namespace labels;
  return p.cr_eps * (sign * p.cr_m * pauli2(IX) - sign * p.cr_mu * pauli2(ZX) + p.cr_eta * pauli2(ZI));
}

std::vector<double> cr_rabi_sweep(const DeviceParams& p, std::span<const double> taus_ns,
                                  bool control_excited) {
  const ComplexMatrix h = cr_hamiltonian(p, +1);
  std::vector<double> out;
  out.reserve(taus_ns.size());
  for (const double tau : taus_ns) {
    // The control stays in its initial basis state, so the closing X_pi does
    // not change the target marginal.
    out.push_back(target_ground_population(matexp_hermitian_generator(h, tau), control_excited));
  }
  return out;
}

std::vector<double> echoed_rabi_sweep(const DeviceParams& p, std::span<const double> taus_ns,
                                      bool control_excited) {
  std::vector<double> out;
  out.reserve(taus_ns.size());
  for (const double tau : taus_ns) {
    DeviceParams q = p;
    q.tau2_ns = tau;
    out.push_back(target_ground_population(echoed_cr_unitary(q), control_excited));
  }
  return out;
}

ComplexMatrix echoed_cr_unitary(const DeviceParams& p) {
  const ComplexMatrix first = matexp_hermitian_generator(cr_hamiltonian(p, +1), p.tau2_ns);
  const ComplexMatrix second = matexp_hermitian_generator(cr_hamiltonian(p, -1), p.tau2_ns);
  return second * control_flip() * first;
}

ComplexMatrix zx_layer_unitary(const DeviceParams& p) {
  using namespace labels;
  const ComplexMatrix gate = p.tau2_ns > 0.0 ? ComplexMatrix(control_flip() * echoed_cr_unitary(p))
                                             : zx_m90_unitary();
  if (p.residual_ix == 0.0 && p.residual_zi == 0.0) return gate;
  const ComplexMatrix residual = 0.5 * (p.residual_ix * pauli2(IX) + p.residual_zi * pauli2(ZI));
  return matexp_hermitian_generator(residual, 1.0) * gate;
}

double NoiseChannel::trace_preservation_defect() const {
  if (kraus.empty()) return 1.0;
  const auto n = kraus.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(n, n);
  for (const auto& k : kraus) sum += k.adjoint() * k;
  return max_abs(sum - ComplexMatrix::Identity(n, n));
}

NoiseChannel single_qubit_decoherence(double t1_us, double t2_us, double duration_ns) {
  require(duration_ns >= 0.0, "decoherence: duration must be non-negative");
  require(t1_us > 0.0 && t2_us > 0.0, "decoherence: T1 and T2 must be positive");
  if (t2_us > 2.0 * t1_us * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "decoherence: T2 = " << t2_us << " us exceeds 2*T1 = " << 2.0 * t1_us << " us";
    throw ValidationError(msg.str());
  }
  const double t_us = duration_ns / 1000.0;
  const double gamma = std::isinf(t1_us) ? 0.0 : 1.0 - std::exp(-t_us / t1_us);
  const double dephasing_rate = std::max(0.0, (std::isinf(t2_us) ? 0.0 : 1.0 / t2_us) -
                                                  (std::isinf(t1_us) ? 0.0 : 0.5 / t1_us));
  const double lambda = 1.0 - std::exp(-2.0 * t_us * dephasing_rate);

  ComplexMatrix a0 = ComplexMatrix::Zero(2, 2), a1 = ComplexMatrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a0(1, 1) = std::sqrt(1.0 - gamma);
  a1(0, 1) = std::sqrt(gamma);
  ComplexMatrix d0 = ComplexMatrix::Zero(2, 2), d1 = ComplexMatrix::Zero(2, 2);
  d0(0, 0) = 1.0;
  d0(1, 1) = std::sqrt(1.0 - lambda);
  d1(1, 1) = std::sqrt(lambda);

  NoiseChannel out;
  for (const auto* d : {&d0, &d1}) {
    for (const auto* a : {&a0, &a1}) {
      ComplexMatrix k = (*d) * (*a);
      if (max_abs(k) > 0.0) out.kraus.push_back(std::move(k));
    }
  }
  return out;
}

NoiseChannel decoherence_channel(const DeviceParams& p, double duration_ns) {
  const auto first = single_qubit_decoherence(p.qubits[0].t1_us, p.qubits[0].t2_us, duration_ns);
  const auto second = single_qubit_decoherence(p.qubits[1].t1_us, p.qubits[1].t2_us, duration_ns);
  NoiseChannel out;
  for (const auto& a : first.kraus)
    for (const auto& b : second.kraus) out.kraus.push_back(kron(a, b));
  return out;
}

NoiseChannel decoherence_channel(double t1_us, double t2_us, double duration_ns) {
  DeviceParams p;
  p.qubits[0].t1_us = p.qubits[1].t1_us = t1_us;
  p.qubits[0].t2_us = p.qubits[1].t2_us = t2_us;
  return decoherence_channel(p, duration_ns);
}

Ptm gate_channel(const Layer& layer, const DeviceParams& p) {
  const ComplexMatrix u = layer.entangling ? zx_layer_unitary(p) : layer_unitary(layer);
  return decoherence_channel(p, p.layer_ns(layer)).ptm() * unitary_to_ptm(u);
}

SpamModel SpamModel::symmetric(double misassign_q1, double misassign_q2, double thermal_q1,
                               double thermal_q2) {
  auto flip = [](double e) {
    Eigen::Matrix2d m;
    m << 1.0 - e, e, e, 1.0 - e;
    return m;
  };
  SpamModel s;
  s.thermal = {thermal_q1, thermal_q2};
  const Eigen::Matrix2d a = flip(misassign_q1), b = flip(misassign_q2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s.confusion(i, j) = a(i / 2, j / 2) * b(i % 2, j % 2);
  return s;
}

PauliVector SpamModel::initial_state() const {
  using namespace labels;
  const double z1 = 1.0 - 2.0 * thermal[0];
  const double z2 = 1.0 - 2.0 * thermal[1];
  PauliVector x = PauliVector::Zero();
  x(II) = 1.0;
  x(ZI) = z1;
  x(IZ) = z2;
  x(ZZ) = z1 * z2;
  return x;
}

void SpamModel::validate() const {
  for (int k = 0; k < 2; ++k) {
    require(thermal[k] >= 0.0 && thermal[k] <= 0.5,
            "spam.thermal_q" + std::to_string(k + 1) + ": must lie in [0, 0.5]");
  }
  for (int i = 0; i < 4; ++i) {
    require((confusion.row(i).array() >= 0.0).all(), "spam.confusion: entries must be non-negative");
    require(std::abs(confusion.row(i).sum() - 1.0) < 1e-9, "spam.confusion: rows must sum to 1");
  }
}

std::array<double, 4> apply_spam(const std::array<double, 4>& ideal, const SpamModel& s) {
  std::array<double, 4> out{};
  for (int c = 0; c < 4; ++c)
    for (int r = 0; r < 4; ++r) out[c] += ideal[r] * s.confusion(r, c);
  return out;
}

}  // namespace rbsim
