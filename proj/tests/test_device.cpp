#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rbsim/device.hpp"
#include "rbsim/error.hpp"

using namespace rbsim;

namespace {

const double kPi = std::numbers::pi;
const double kInf = std::numeric_limits<double>::infinity();

oracle::Mat x_pi_on_control() {
  return oracle::kron(oracle::expm_taylor(oracle::C(0.0, -kPi / 2.0) * oracle::pauli(1)), oracle::pauli(0));
}

oracle::Mat hamiltonian_oracle(double eps, double m, double mu, double eta, int sign, int eta_sign) {
  return eps * (sign * m * oracle::pauli2(labels::IX) - sign * mu * oracle::pauli2(labels::ZX) +
                eta_sign * eta * oracle::pauli2(labels::ZI));
}

// Three-segment product computed with the series exponential.
oracle::Mat echo_oracle(double eps, double m, double mu, double eta, double tau, bool flip_eta) {
  const oracle::C mi(0.0, -1.0);
  const oracle::Mat first = oracle::expm_taylor(mi * tau * hamiltonian_oracle(eps, m, mu, eta, +1, 1));
  const oracle::Mat second =
      oracle::expm_taylor(mi * tau * hamiltonian_oracle(eps, m, mu, eta, -1, flip_eta ? -1 : 1));
  return second * x_pi_on_control() * first;
}

DeviceParams drive(double eps, double m, double mu, double eta, double tau2) {
  DeviceParams p = DeviceParams::noiseless();
  p.cr_eps = eps;
  p.cr_m = m;
  p.cr_mu = mu;
  p.cr_eta = eta;
  p.tau2_ns = tau2;
  return p;
}

// Mean angular frequency of p(t) = cos^2(w t / 2) from its crossings of 1/2.
double oscillation_frequency(const std::vector<double>& taus, const std::vector<double>& p) {
  std::vector<double> crossings;
  for (std::size_t k = 1; k < p.size(); ++k) {
    const double a = p[k - 1] - 0.5, b = p[k] - 0.5;
    if (a * b < 0.0) crossings.push_back(taus[k - 1] + (taus[k] - taus[k - 1]) * a / (a - b));
  }
  const double half_periods = static_cast<double>(crossings.size() - 1);
  return kPi * half_periods / (crossings.back() - crossings.front());
}

Ptm amplitude_phase_oracle(double t1, double t2, double ns) {
  // Single-qubit PTM of T1/T2 decay written from the Bloch equations.
  const double t = ns / 1000.0;
  const double e1 = std::isinf(t1) ? 1.0 : std::exp(-t / t1);
  const double e2 = std::isinf(t2) ? 1.0 : std::exp(-t / t2);
  Eigen::Matrix4d q = Eigen::Matrix4d::Zero();
  q(0, 0) = 1.0;
  q(1, 1) = q(2, 2) = e2;
  q(3, 3) = e1;
  q(3, 0) = 1.0 - e1;
  Ptm r;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) r(i, j) = q(i / 4, j / 4) * q(i % 4, j % 4);
  return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// Hamiltonian

TEST(CrHamiltonian, ZeroDriveIsZero) {
  DeviceParams p = drive(0.0, 1.0, 0.05, 0.2, 100.0);
  EXPECT_EQ(max_abs(cr_hamiltonian(p, +1)), 0.0);
}

TEST(CrHamiltonian, TermsCommute) {
  using namespace labels;
  for (auto [a, b] : {std::pair{IX, ZX}, std::pair{IX, ZI}, std::pair{ZX, ZI}})
    EXPECT_EQ(max_abs(pauli2(a) * pauli2(b) - pauli2(b) * pauli2(a)), 0.0);
}

TEST(CrHamiltonian, SignFlipsIxAndZxOnly) {
  const DeviceParams p = drive(0.3, 1.0, 0.05, 0.2, 100.0);
  const ComplexMatrix plus = cr_hamiltonian(p, +1);
  const ComplexMatrix minus = cr_hamiltonian(p, -1);
  auto coeff = [](const ComplexMatrix& h, int label) { return (pauli2(label) * h).trace().real() / 4.0; };
  EXPECT_NEAR(coeff(plus, labels::IX), 0.3, 1e-15);
  EXPECT_NEAR(coeff(plus, labels::ZX), -0.015, 1e-15);
  EXPECT_NEAR(coeff(plus, labels::ZI), 0.06, 1e-15);
  EXPECT_NEAR(coeff(minus, labels::IX), -0.3, 1e-15);
  EXPECT_NEAR(coeff(minus, labels::ZX), 0.015, 1e-15);
  EXPECT_NEAR(coeff(minus, labels::ZI), 0.06, 1e-15);
  EXPECT_LT(max_abs(plus - hamiltonian_oracle(0.3, 1.0, 0.05, 0.2, 1, 1)), 1e-15);
  EXPECT_THROW(cr_hamiltonian(p, 0), ValidationError);
}

// ---------------------------------------------------------------------------
// Rabi traces

TEST(CrRabi, NoConditionalTermGivesEqualFrequencies) {
  const DeviceParams p = drive(0.02, 1.0, 0.0, 0.2, 100.0);
  std::vector<double> taus;
  for (int k = 0; k <= 2000; ++k) taus.push_back(0.5 * k);
  const auto ground = cr_rabi_sweep(p, taus, false);
  const auto excited = cr_rabi_sweep(p, taus, true);
  for (std::size_t k = 0; k < taus.size(); ++k) EXPECT_NEAR(ground[k], excited[k], 1e-12);
}

TEST(CrRabi, BranchFrequencyRatio) {
  const DeviceParams p = drive(0.02, 1.0, 0.1, 0.2, 100.0);
  std::vector<double> taus;
  for (int k = 0; k <= 40000; ++k) taus.push_back(0.25 * k);
  const double w0 = oscillation_frequency(taus, cr_rabi_sweep(p, taus, false));
  const double w1 = oscillation_frequency(taus, cr_rabi_sweep(p, taus, true));
  EXPECT_NEAR(w0 / w1, 0.9 / 1.1, 1e-3);
  EXPECT_NEAR(w0, 2.0 * 0.02 * 0.9, 1e-4);
  EXPECT_NEAR(w1, 2.0 * 0.02 * 1.1, 1e-4);
}

TEST(CrRabi, PureStarkLeavesTargetInGround) {
  const DeviceParams p = drive(0.02, 0.0, 0.0, 0.5, 100.0);
  std::vector<double> taus = {0.0, 10.0, 123.0, 400.0, 1000.0};
  for (bool excited : {false, true})
    for (double v : cr_rabi_sweep(p, taus, excited)) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(CrRabi, EchoedBranchesCoincide) {
  const DeviceParams p = drive(0.02, 1.0, 0.1, 0.3, 100.0);
  std::vector<double> taus;
  for (int k = 0; k <= 400; ++k) taus.push_back(2.0 * k);
  const auto ground = echoed_rabi_sweep(p, taus, false);
  const auto excited = echoed_rabi_sweep(p, taus, true);
  for (std::size_t k = 0; k < taus.size(); ++k) {
    EXPECT_NEAR(ground[k], excited[k], 1e-10);
    EXPECT_NEAR(ground[k], std::pow(std::cos(2.0 * 0.02 * 0.1 * taus[k]), 2), 1e-10);
  }
}

// ---------------------------------------------------------------------------
// Echo

TEST(Echo, NoSpectatorTermsIsExact) {
  const DeviceParams p = drive(0.01, 0.0, 0.07, 0.0, 150.0);
  const oracle::Mat expected =
      x_pi_on_control() * oracle::expm_taylor(oracle::C(0.0, 2.0 * 0.01 * 0.07 * 150.0) * oracle::pauli2(labels::ZX));
  EXPECT_LT(max_abs(echoed_cr_unitary(p) - expected), 1e-12);
}

TEST(Echo, RandomDrivesCancelIxAndZi) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> coef(0.0, 2.0), eps(0.0, 0.05), tau(0.0, 300.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double e = eps(rng), m = coef(rng), mu = coef(rng), eta = coef(rng), t = tau(rng);
    const ComplexMatrix u = echoed_cr_unitary(drive(e, m, mu, eta, t));
    EXPECT_LT(max_abs(u - echo_oracle(e, m, mu, eta, t, false)), 1e-9);
    const oracle::Mat target = oracle::expm_taylor(oracle::C(0.0, 2.0 * e * mu * t) * oracle::pauli2(labels::ZX));
    EXPECT_LT(max_abs(x_pi_on_control().adjoint() * u - target), 1e-10);
    const ComplexMatrix frame = x_pi_on_control().adjoint() * u;
    EXPECT_LT(max_abs(frame * pauli2(labels::ZX) - pauli2(labels::ZX) * frame),
              1e-10);
  }
}

TEST(Echo, FlippingStarkTermBreaksCancellation) {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> coef(0.5, 2.0), tau(50.0, 300.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double e = 0.01, m = coef(rng), mu = coef(rng), eta = coef(rng), t = tau(rng);
    const oracle::Mat u = echo_oracle(e, m, mu, eta, t, true);
    const oracle::Mat target = oracle::expm_taylor(oracle::C(0.0, 2.0 * e * mu * t) * oracle::pauli2(labels::ZX));
    // Only fails to cancel when the ZI phase is not a multiple of pi.
    if (std::abs(std::sin(2.0 * e * eta * t)) < 0.1) continue;
    EXPECT_GT(max_abs(x_pi_on_control().adjoint() * u - target), 1e-3);
  }
}

TEST(Echo, CalibrationReproducesSegmentLength) {
  const double rate = kPi / (8.0 * 178.0);
  EXPECT_NEAR(calibrated_tau2(rate), 178.0, 1e-12);
  EXPECT_NEAR(calibrated_cr_rate(178.0), rate, 1e-18);
  const DeviceParams p = DeviceParams::measured_defaults();
  EXPECT_NEAR(p.cr_rate(), rate, 1e-15);
  EXPECT_NEAR(p.zx_gate_ns(), 420.0, 1e-12);
}

TEST(Echo, CalibratedLayerIsZxMinusHalfPi) {
  for (double tau2 : {0.0, 60.0, 178.0, 500.0}) {
    const DeviceParams p = DeviceParams::noiseless().with_tau2(tau2);
    const Ptm r = unitary_to_ptm(zx_layer_unitary(p));
    EXPECT_LT((r - oracle::ptm_brute(zx_m90_unitary())).cwiseAbs().maxCoeff(), 1e-9) << tau2;
  }
}

TEST(Echo, ResidualErrorIsApplied) {
  DeviceParams p = DeviceParams::noiseless();
  p.residual_zi = 0.1;
  const oracle::Mat expected =
      oracle::expm_taylor(oracle::C(0.0, -0.05) * oracle::pauli2(labels::ZI)) * zx_m90_unitary();
  EXPECT_LT((unitary_to_ptm(zx_layer_unitary(p)) - oracle::ptm_brute(expected)).cwiseAbs().maxCoeff(), 1e-10);
}

// ---------------------------------------------------------------------------
// Decoherence

TEST(Decoherence, ZeroDurationAndInfiniteTimesAreIdentity) {
  EXPECT_LT((decoherence_channel(11.6, 7.1, 0.0).ptm() - Ptm::Identity()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((decoherence_channel(kInf, kInf, 420.0).ptm() - Ptm::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Decoherence, AmplitudeDampingStrength) {
  const double gamma = 1.0 - std::exp(-420.0 / 11600.0);
  EXPECT_NEAR(gamma, 0.0356, 5e-5);
  const Ptm r = decoherence_channel(11.6, 23.2, 420.0).ptm();
  EXPECT_NEAR(r(labels::ZI, labels::II), gamma, 1e-12);
  EXPECT_NEAR(r(labels::IZ, labels::II), gamma, 1e-12);
}

TEST(Decoherence, MatchesBlochEquations) {
  const DeviceParams p = DeviceParams::measured_defaults();
  for (double ns : {32.0, 420.0, 5000.0}) {
    const Ptm r = decoherence_channel(11.6, 7.1, ns).ptm();
    EXPECT_LT((r - amplitude_phase_oracle(11.6, 7.1, ns)).cwiseAbs().maxCoeff(), 1e-12);
    const Ptm two = decoherence_channel(p, ns).ptm();
    EXPECT_NEAR(two(labels::XI, labels::XI), std::exp(-ns / 7100.0), 1e-12);
    EXPECT_NEAR(two(labels::IX, labels::IX), std::exp(-ns / 5600.0), 1e-12);
  }
}

TEST(Decoherence, TracePreservingWithUnitFirstRow) {
  const DeviceParams p = DeviceParams::measured_defaults();
  for (double ns : {0.0, 32.0, 420.0, 10000.0}) {
    const auto ch = decoherence_channel(p, ns);
    EXPECT_LT(ch.trace_preservation_defect(), 1e-10);
    const Ptm r = ch.ptm();
    EXPECT_NEAR(r(0, 0), 1.0, 1e-12);
    EXPECT_LT(r.row(0).tail(15).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Decoherence, SemigroupProperty) {
  const DeviceParams p = DeviceParams::measured_defaults();
  const Ptm a = decoherence_channel(p, 150.0).ptm();
  const Ptm b = decoherence_channel(p, 270.0).ptm();
  EXPECT_LT((b * a - decoherence_channel(p, 420.0).ptm()).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Decoherence, RejectsUnphysicalT2) {
  EXPECT_THROW(decoherence_channel(5.0, 10.5, 100.0), ValidationError);
  EXPECT_NO_THROW(decoherence_channel(5.0, 10.0, 100.0));
  DeviceParams p = DeviceParams::measured_defaults();
  p.qubits[1].t2_us = 30.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

// ---------------------------------------------------------------------------
// Gate channels

TEST(GateChannel, NoiselessLayersAreExact) {
  const DeviceParams p = DeviceParams::noiseless();
  for (Gate1 a : kGate1Alphabet)
    for (Gate1 b : kGate1Alphabet) {
      const Layer l = Layer::local(a, b);
      EXPECT_LT((gate_channel(l, p) - layer_perm(l).to_matrix()).cwiseAbs().maxCoeff(), 1e-12);
    }
  EXPECT_LT((gate_channel(Layer::zx(), p) - zx_m90_perm().to_matrix()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GateChannel, IdleLayerIsPureDecoherence) {
  const DeviceParams p = DeviceParams::measured_defaults();
  const Ptm r = gate_channel(Layer::local(Gate1::I, Gate1::I), p);
  EXPECT_LT((r - decoherence_channel(p, 32.0).ptm()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(r(0, 0), 1.0, 1e-15);
  EXPECT_LT(r.row(0).tail(15).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(decoherence_channel(p, 420.0).ptm()(labels::ZZ, labels::ZZ), 1.0);
}

TEST(GateChannel, ZxLayerDurationIncludesEchoPulses) {
  const DeviceParams p = DeviceParams::measured_defaults();
  const Ptm r = gate_channel(Layer::zx(), p);
  const Ptm expected = decoherence_channel(p, 420.0).ptm() * zx_m90_perm().to_matrix();
  EXPECT_LT((r - expected).cwiseAbs().maxCoeff(), 1e-9);
}

// ---------------------------------------------------------------------------
// SPAM

TEST(Spam, IdealIsUnchanged) {
  const std::array<double, 4> in = {0.4, 0.3, 0.2, 0.1};
  const auto out = apply_spam(in, SpamModel::ideal());
  for (int k = 0; k < 4; ++k) EXPECT_EQ(out[k], in[k]);
}

TEST(Spam, UniformRowsLoseAllInformation) {
  SpamModel s;
  s.confusion.setConstant(0.25);
  for (const auto& in : {std::array<double, 4>{1, 0, 0, 0}, std::array<double, 4>{0.1, 0.2, 0.3, 0.4}}) {
    const auto out = apply_spam(in, s);
    for (double v : out) EXPECT_NEAR(v, 0.25, 1e-15);
  }
}

TEST(Spam, TwoPercentMisassignment) {
  const auto out = apply_spam({1, 0, 0, 0}, SpamModel::symmetric(0.02, 0.02, 0.0, 0.0));
  EXPECT_NEAR(out[0], 0.9604, 1e-12);
  EXPECT_NEAR(out[1], 0.0196, 1e-12);
  EXPECT_NEAR(out[2], 0.0196, 1e-12);
  EXPECT_NEAR(out[3], 0.0004, 1e-12);
  EXPECT_NEAR(out[0] + out[1] + out[2] + out[3], 1.0, 1e-15);
}

TEST(Spam, ThermalPopulationEntersInitialState) {
  const auto s = SpamModel::symmetric(0.0, 0.0, 0.01, 0.03);
  const auto p = computational_probabilities(s.initial_state());
  EXPECT_NEAR(p[0], 0.99 * 0.97, 1e-12);
  EXPECT_NEAR(p[1], 0.99 * 0.03, 1e-12);
  EXPECT_NEAR(p[2], 0.01 * 0.97, 1e-12);
  EXPECT_NEAR(p[3], 0.01 * 0.03, 1e-12);
}

TEST(Spam, ValidationRejectsBadModels) {
  SpamModel s;
  s.confusion(0, 1) = 0.1;
  EXPECT_THROW(s.validate(), ValidationError);
  SpamModel hot;
  hot.thermal[0] = 0.6;
  EXPECT_THROW(hot.validate(), ValidationError);
}
