#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "rbsim/error.hpp"
#include "rbsim/rb.hpp"
#include "rbsim/tomography.hpp"

using namespace rbsim;

namespace {

const double kPi = std::numbers::pi;
const TomographySettings kExact{std::nullopt, 1};

const CliffordTable& table() { return two_qubit_cliffords(); }

// {I, X_pi, X_+pi/2, X_-pi/2, Y_+pi/2, Y_-pi/2} from the series exponential.
oracle::Mat rotation_oracle(int k) {
  const int axis[] = {0, 1, 1, 1, 2, 2};
  const double angle[] = {0.0, kPi, kPi / 2, -kPi / 2, kPi / 2, -kPi / 2};
  return oracle::expm_taylor(oracle::C(0.0, -angle[k] / 2.0) * oracle::pauli(axis[k]));
}

oracle::Mat setting_oracle(int s) { return oracle::kron(rotation_oracle(s / 6), rotation_oracle(s % 6)); }

double frobenius(const Ptm& a, const Ptm& b) { return (a - b).norm(); }

}  // namespace

TEST(SimulateQpt, IdentityChannelDiagonalSetting) {
  const auto rec = simulate_qpt(Ptm::Identity(), kExact, SpamModel::ideal());
  ASSERT_EQ(rec.probabilities.size(), 36u);
  EXPECT_NEAR(rec.probabilities[0][0][0], 1.0, 1e-12);
}

TEST(SimulateQpt, IdentityChannelMatchesStateVectors) {
  const auto rec = simulate_qpt(Ptm::Identity(), kExact, SpamModel::ideal());
  for (int prep = 0; prep < 36; ++prep) {
    for (int meas = 0; meas < 36; ++meas) {
      const Eigen::VectorXcd psi = setting_oracle(meas) * setting_oracle(prep).col(0);
      for (int k = 0; k < 4; ++k) EXPECT_NEAR(rec.probabilities[prep][meas][k], std::norm(psi(k)), 1e-12);
    }
  }
}

TEST(SimulateQpt, FullyDepolarizingIsUniform) {
  const auto rec = simulate_qpt(depolarizing_ptm(0.0), kExact, SpamModel::ideal());
  for (const auto& row : rec.probabilities)
    for (const auto& p : row)
      for (double v : p) EXPECT_NEAR(v, 0.25, 1e-12);
}

TEST(SimulateQpt, ShotsSumToOne) {
  const auto rec = simulate_qpt(depolarizing_ptm(0.8), {100, 7}, SpamModel::ideal());
  for (const auto& row : rec.probabilities)
    for (const auto& p : row) {
      EXPECT_NEAR(p[0] + p[1] + p[2] + p[3], 1.0, 1e-12);
      for (double v : p) EXPECT_NEAR(v * 100.0, std::round(v * 100.0), 1e-9);
    }
}

TEST(SimulateQpt, RejectsNonTracePreservingChannel) {
  Ptm r = Ptm::Identity();
  r(0, 0) = 1.02;
  EXPECT_THROW(simulate_qpt(r, kExact, SpamModel::ideal()), ValidationError);
}

TEST(LinearInversion, RecoversIdentity) {
  const Ptm r = linear_inversion_ptm(simulate_qpt(Ptm::Identity(), kExact, SpamModel::ideal()));
  EXPECT_LT((r - Ptm::Identity()).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(LinearInversion, RecoversCliffords) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<std::size_t> pick(0, table().size() - 1);
  for (int trial = 0; trial < 10; ++trial) {
    const Ptm truth = table().element(pick(rng)).to_matrix();
    const Ptm r = linear_inversion_ptm(simulate_qpt(truth, kExact, SpamModel::ideal()));
    EXPECT_LT((r - truth).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(LinearInversion, RecoversArbitraryChannels) {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    const Ptm truth = oracle::ptm_brute(oracle::random_kraus(rng, 3));
    const Ptm r = linear_inversion_ptm(simulate_qpt(truth, kExact, SpamModel::ideal()));
    EXPECT_LT((r - truth).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(LinearInversion, RejectsIncompleteRecord) {
  TomographyRecord rec;
  rec.probabilities.resize(10);
  EXPECT_THROW(linear_inversion_ptm(rec), ValidationError);
}

TEST(LinearInversion, SpamLowersReconstructedFidelity) {
  const DeviceParams p = DeviceParams::measured_defaults();
  const Ptm truth = gate_channel(Layer::zx(), p);
  const Ptm ideal = zx_m90_perm().to_matrix();
  const double f_true = avg_gate_fidelity(truth, ideal);
  const Ptm r = linear_inversion_ptm(simulate_qpt(truth, kExact, SpamModel::symmetric(0.02, 0.02, 0.0, 0.0)));
  const double drop = f_true - avg_gate_fidelity(r, truth);
  EXPECT_GT(f_true - avg_gate_fidelity(r, ideal), 0.01);
  EXPECT_GT(drop, 0.01);
  EXPECT_LT(drop, 0.1);
}

// ---------------------------------------------------------------------------
// Projection

TEST(ProjectCptp, FeasibleInputIsUnchanged) {
  std::mt19937_64 rng(63);
  const Ptm truth = oracle::ptm_brute(oracle::random_kraus(rng, 2));
  const auto out = project_cptp(truth);
  EXPECT_TRUE(out.converged);
  EXPECT_LT((out.ptm - truth).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ProjectCptp, FirstRowBecomesExact) {
  Ptm r = Ptm::Identity();
  r(0, 0) = 1.02;
  const auto out = project_cptp(r);
  EXPECT_TRUE(out.converged);
  EXPECT_EQ(out.ptm(0, 0), 1.0);
  for (int j = 1; j < 16; ++j) EXPECT_EQ(out.ptm(0, j), 0.0);
  EXPECT_GE(out.min_eigenvalue, -1e-9);
  EXPECT_LE(out.tp_residual, 1e-9);
}

TEST(ProjectCptp, PerturbedCliffordsMoveCloserToTruth) {
  std::mt19937_64 rng(64);
  std::uniform_int_distribution<std::size_t> pick(0, table().size() - 1);
  std::normal_distribution<double> noise(0.0, 0.05);
  int closer = 0;
  double before = 0.0, after = 0.0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    const Ptm truth = table().element(pick(rng)).to_matrix();
    Ptm noisy = truth;
    for (int i = 0; i < 16; ++i)
      for (int j = 0; j < 16; ++j) noisy(i, j) += noise(rng);
    const auto out = project_cptp(noisy);
    EXPECT_TRUE(out.converged);
    EXPECT_GE(out.min_eigenvalue, -1e-9);
    EXPECT_LE(out.tp_residual, 1e-9);
    const double d0 = frobenius(noisy, truth), d1 = frobenius(out.ptm, truth);
    closer += d1 < d0;
    before += d0;
    after += d1;
  }
  EXPECT_EQ(closer, trials);
  EXPECT_LT(after, before);
}

TEST(ProjectCptp, Idempotent) {
  std::mt19937_64 rng(65);
  std::normal_distribution<double> noise(0.0, 0.05);
  Ptm noisy = depolarizing_ptm(0.9);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) noisy(i, j) += noise(rng);
  const auto once = project_cptp(noisy);
  const auto twice = project_cptp(once.ptm);
  EXPECT_LT((once.ptm - twice.ptm).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(ProjectCptp, ResidualsMatchIndependentCheck) {
  std::mt19937_64 rng(66);
  std::normal_distribution<double> noise(0.0, 0.05);
  Ptm noisy = Ptm::Identity();
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) noisy(i, j) += noise(rng);
  const auto out = project_cptp(noisy);
  const ComplexMatrix chi = choi_from_ptm(out.ptm);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(chi);
  EXPECT_NEAR(es.eigenvalues().minCoeff(), out.min_eigenvalue, 1e-12);
  // Tr_out chi = I/4 independently: sum the output blocks.
  ComplexMatrix marginal = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) marginal(i, j) += chi(4 * i + k, 4 * j + k);
  EXPECT_LT(max_abs(marginal - ComplexMatrix::Identity(4, 4) / 4.0), 1e-9);
}

// ---------------------------------------------------------------------------
// Reports

TEST(QptReport, IdealChannel) {
  const Ptm ideal = zx_m90_perm().to_matrix();
  const Ptm raw = linear_inversion_ptm(simulate_qpt(ideal, kExact, SpamModel::ideal()));
  const auto rep = qpt_report(raw, project_cptp(raw).ptm, ideal);
  EXPECT_NEAR(rep.raw_fidelity, 1.0, 1e-9);
  EXPECT_NEAR(rep.projected_fidelity, 1.0, 1e-9);
}

TEST(QptReport, DepolarizingFidelity) {
  const Ptm raw = linear_inversion_ptm(simulate_qpt(depolarizing_ptm(0.9), kExact, SpamModel::ideal()));
  const auto rep = qpt_report(raw, project_cptp(raw).ptm, Ptm::Identity());
  EXPECT_NEAR(rep.raw_fidelity, 0.925, 1e-9);
  EXPECT_NEAR(rep.projected_fidelity, 0.925, 1e-9);
}

TEST(QptReport, SpamCorruptedZxBelowRbImpliedFidelity) {
  const DeviceParams p = DeviceParams::measured_defaults();
  const Ptm ideal = zx_m90_perm().to_matrix();
  const Ptm truth = gate_channel(Layer::zx(), p);
  const auto spam = SpamModel::symmetric(0.02, 0.02, 0.01, 0.01);
  const Ptm raw = linear_inversion_ptm(simulate_qpt(truth, {1000, 3}, spam));
  const auto proj = project_cptp(raw);
  ASSERT_TRUE(proj.converged);
  const auto rep = qpt_report(raw, proj.ptm, ideal);

  RBConfig cfg;
  cfg.shots.reset();
  cfg.sequences = 20;
  const NoiseModel noise = NoiseModel::from_device(table(), p);
  const std::size_t gate = table().lookup(zx_m90_perm());
  const FitResult ref = fit_dataset(run_rb(cfg, table(), noise, spam));
  const FitResult inter = fit_dataset(run_interleaved(cfg, table(), noise, spam, gate));
  const double f_rb = 1.0 - interleaved_error(ref.params.alpha, inter.params.alpha, 4);

  EXPECT_LE(rep.projected_fidelity, rep.raw_fidelity + 0.01);
  EXPECT_LT(rep.raw_fidelity, f_rb);
  EXPECT_LT(rep.projected_fidelity, f_rb);
}

TEST(TomographyRotation, MatchesOracle) {
  for (int s = 0; s < 36; ++s) EXPECT_LT(max_abs(tomography_rotation(s) - setting_oracle(s)), 1e-12);
  EXPECT_THROW(tomography_rotation(36), ValidationError);
}
