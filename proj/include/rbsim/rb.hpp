#pragma once

// Randomized benchmarking campaigns: standard two-qubit RB, interleaved RB,
// and simultaneous single-qubit RB, simulated in the Pauli-transfer picture.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbsim/clifford.hpp"
#include "rbsim/device.hpp"
#include "rbsim/fit.hpp"
#include "rbsim/pauli.hpp"

namespace rbsim {

struct RBConfig {
  std::vector<int> lengths = default_lengths();
  int sequences = 40;
  std::optional<int> shots = 1000;  // nullopt: exact probabilities
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency

  static std::vector<int> default_lengths();
  int max_length() const { return lengths.empty() ? 0 : lengths.back(); }
  void validate() const;
};

// Noisy transfer matrix of every table element, as executed.
struct NoiseModel {
  std::vector<Ptm> clifford;
  // When false the final inverting Clifford is applied noiselessly.
  bool noisy_inversion = true;
  // Channel of the interleaved gate when it is not executed through its
  // table circuit (e.g. a bare ZX_{-pi/2} pulse).
  std::optional<Ptm> interleaved_gate;

  // Each element compiled to layers; each layer is gate_channel().
  static NoiseModel from_device(const CliffordTable& table, const DeviceParams& p);
  // R_E . R_C for every element C.
  static NoiseModel gate_independent(const CliffordTable& table, const Ptm& channel);
  static NoiseModel ideal(const CliffordTable& table);
};

struct RBSequence {
  std::vector<std::size_t> cliffords;
  std::size_t inversion = 0;
  std::optional<std::size_t> interleaved;
};

// Which elements a campaign draws from and which gate (if any) follows each.
struct SequenceSpec {
  std::vector<std::size_t> candidates;  // empty: the whole table
  std::optional<std::size_t> interleaved;
  std::uint64_t stream_tag = 0;
};

// Per base sequence, cfg.max_length() uniform draws from the candidates.
// Deterministic given (seed, stream_tag).
std::vector<std::vector<std::size_t>> draw_base_sequences(const RBConfig& cfg, const CliffordTable& table,
                                                          const SequenceSpec& spec);

// One RBSequence per (base sequence, length), truncations sharing the base
// draw, ordered sequence-major. The inversion is the exact group inverse.
std::vector<RBSequence> sample_sequences(const RBConfig& cfg, const CliffordTable& table,
                                         const SequenceSpec& spec = {});

// Composition of the whole pulse train including the inversion.
SignedPauliPerm sequence_product(const RBSequence& seq, const CliffordTable& table);

// Outcome probabilities over {00, 01, 10, 11} after readout.
std::array<double, 4> outcome_probabilities(const RBSequence& seq, const CliffordTable& table,
                                            const NoiseModel& noise, const SpamModel& spam);
double survival_probability(const RBSequence& seq, const CliffordTable& table, const NoiseModel& noise,
                            const SpamModel& spam);

enum class Observable { P00, Qubit1, Qubit2, Parity };
// P00; p00 + p01 (qubit 1 in 0); p00 + p10 (qubit 2 in 0); p00 + p11.
double observable_value(Observable o, const std::array<double, 4>& probs);

struct DecayDataset {
  std::string protocol;
  std::uint64_t seed = 0;
  std::optional<int> shots;
  std::vector<int> lengths;
  std::vector<std::vector<double>> values;  // [length index][sequence index]

  std::vector<double> means() const;
  std::vector<double> standard_errors() const;
};

// Fits per-length means weighted by their standard errors. When the
// sequences do not scatter (standard error below 1e-12), all points are
// weighted equally.
FitResult fit_dataset(const DecayDataset& data, double b0 = 0.25);

struct Campaign {
  std::string protocol;
  SequenceSpec spec;
  std::vector<Observable> observables = {Observable::P00};
  std::vector<std::string> observable_names;  // protocol tag per observable
};

std::vector<DecayDataset> run_campaign(const RBConfig& cfg, const CliffordTable& table,
                                       const NoiseModel& noise, const SpamModel& spam,
                                       const Campaign& campaign);

DecayDataset run_rb(const RBConfig& cfg, const CliffordTable& table, const NoiseModel& noise,
                    const SpamModel& spam);
// Throws ValidationError if `gate_index` is not a table index.
DecayDataset run_interleaved(const RBConfig& cfg, const CliffordTable& table, const NoiseModel& noise,
                             const SpamModel& spam, std::size_t gate_index);

struct SimultaneousData {
  DecayDataset q1;       // C (x) I, qubit-1 survival
  DecayDataset q2;       // I (x) C, qubit-2 survival
  DecayDataset cc_q1;    // C (x) C, p00 + p01
  DecayDataset cc_q2;    // C (x) C, p00 + p10
  DecayDataset cc_joint; // C (x) C, p00 + p11
};

struct SimultaneousAnalysis {
  FitResult alpha1, alpha2, alpha1_2, alpha2_1, alpha12;
  Estimate r1, r2, r1_2, r2_1;
  Estimate delta;
};

SimultaneousData run_simultaneous_1q(const RBConfig& cfg, const CliffordTable& table,
                                     const NoiseModel& noise, const SpamModel& spam);
SimultaneousAnalysis analyze_simultaneous(const SimultaneousData& data);

// (1/|C|) sum_C R_C^T R_E R_C over the whole table.
Ptm clifford_twirl(const CliffordTable& table, const Ptm& channel);
// (Tr R_E - 1) / 15.
double depolarizing_parameter(const Ptm& channel);

}  // namespace rbsim
