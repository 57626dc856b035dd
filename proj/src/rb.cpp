#include "rbsim/rb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <random>
#include <thread>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

enum StreamKind : std::uint32_t { kDrawStream = 1, kShotStream = 2 };

std::mt19937_64 derived_stream(std::uint64_t seed, std::uint64_t tag, std::uint32_t kind, std::uint64_t a,
                               std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(tag >> 32),
                    kind, static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
  return std::mt19937_64(seq);
}

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) fn(k);
    });
  }
}

std::array<double, 4> sample_counts(const std::array<double, 4>& probs, int shots, std::mt19937_64& rng) {
  std::array<double, 4> freq{};
  int remaining = shots;
  double mass = 1.0;
  for (int k = 0; k < 3 && remaining > 0; ++k) {
    const double p = mass > 0.0 ? std::clamp(probs[k] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<int> draw(remaining, p);
    const int n = draw(rng);
    freq[k] = n;
    remaining -= n;
    mass -= probs[k];
  }
  freq[3] = remaining;
  for (auto& f : freq) f /= shots;
  return freq;
}

std::vector<std::size_t> all_indices(const CliffordTable& table) {
  std::vector<std::size_t> out(table.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = k;
  return out;
}

}  // namespace

std::vector<int> RBConfig::default_lengths() {
  std::vector<int> out(20);
  for (int k = 0; k < 20; ++k) out[k] = k + 1;
  return out;
}

void RBConfig::validate() const {
  if (lengths.empty()) throw ValidationError("rb.lengths: must not be empty");
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    if (lengths[k] < 1) throw ValidationError("rb.lengths: lengths must be positive");
    if (k > 0 && lengths[k] <= lengths[k - 1]) throw ValidationError("rb.lengths: must be strictly increasing");
  }
  if (sequences < 1) throw ValidationError("rb.sequences: must be at least 1");
  if (shots && *shots < 1) throw ValidationError("rb.shots: must be positive or 'exact'");
}

NoiseModel NoiseModel::from_device(const CliffordTable& table, const DeviceParams& p) {
  p.validate();
  std::array<Ptm, 49> local;
  for (auto a : kGate1Alphabet)
    for (auto b : kGate1Alphabet)
      local[7 * static_cast<int>(a) + static_cast<int>(b)] = gate_channel(Layer::local(a, b), p);
  const Ptm zx = gate_channel(Layer::zx(), p);

  NoiseModel model;
  model.clifford.resize(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) {
    Ptm acc = Ptm::Identity();
    for (const auto& layer : table.circuit(k).layers) {
      const Ptm& r = layer.entangling ? zx : local[7 * static_cast<int>(layer.q1) + static_cast<int>(layer.q2)];
      acc = r * acc;
    }
    model.clifford[k] = acc;
  }
  model.interleaved_gate = zx;
  return model;
}

NoiseModel NoiseModel::gate_independent(const CliffordTable& table, const Ptm& channel) {
  NoiseModel model;
  model.clifford.resize(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) model.clifford[k] = channel * table.element(k).to_matrix();
  return model;
}

NoiseModel NoiseModel::ideal(const CliffordTable& table) { return gate_independent(table, Ptm::Identity()); }

std::vector<std::vector<std::size_t>> draw_base_sequences(const RBConfig& cfg, const CliffordTable& table,
                                                          const SequenceSpec& spec) {
  const std::vector<std::size_t> candidates = spec.candidates.empty() ? all_indices(table) : spec.candidates;
  std::vector<std::vector<std::size_t>> out(cfg.sequences);
  for (int s = 0; s < cfg.sequences; ++s) {
    auto rng = derived_stream(cfg.seed, spec.stream_tag, kDrawStream, static_cast<std::uint64_t>(s), 0);
    std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
    out[s].resize(cfg.max_length());
    for (auto& c : out[s]) c = candidates[pick(rng)];
  }
  return out;
}

std::vector<RBSequence> sample_sequences(const RBConfig& cfg, const CliffordTable& table,
                                         const SequenceSpec& spec) {
  cfg.validate();
  if (spec.interleaved && *spec.interleaved >= table.size())
    throw ValidationError("interleaved gate index is not a table element");
  const auto base = draw_base_sequences(cfg, table, spec);
  std::vector<RBSequence> out;
  out.reserve(base.size() * cfg.lengths.size());
  for (const auto& draws : base) {
    SignedPauliPerm product = SignedPauliPerm::identity();
    int done = 0;
    for (const int length : cfg.lengths) {
      for (; done < length; ++done) {
        product = compose(table.element(draws[done]), product);
        if (spec.interleaved) product = compose(table.element(*spec.interleaved), product);
      }
      RBSequence seq;
      seq.cliffords.assign(draws.begin(), draws.begin() + length);
      seq.interleaved = spec.interleaved;
      seq.inversion = table.lookup(invert(product));
      out.push_back(std::move(seq));
    }
  }
  return out;
}

SignedPauliPerm sequence_product(const RBSequence& seq, const CliffordTable& table) {
  SignedPauliPerm product = SignedPauliPerm::identity();
  for (const auto c : seq.cliffords) {
    product = compose(table.element(c), product);
    if (seq.interleaved) product = compose(table.element(*seq.interleaved), product);
  }
  return compose(table.element(seq.inversion), product);
}

std::array<double, 4> outcome_probabilities(const RBSequence& seq, const CliffordTable& table,
                                            const NoiseModel& noise, const SpamModel& spam) {
  PauliVector x = spam.initial_state();
  const Ptm* gate = nullptr;
  if (seq.interleaved) gate = noise.interleaved_gate ? &*noise.interleaved_gate : &noise.clifford.at(*seq.interleaved);
  for (const auto c : seq.cliffords) {
    x = noise.clifford.at(c) * x;
    if (gate) x = *gate * x;
  }
  if (noise.noisy_inversion) {
    x = noise.clifford.at(seq.inversion) * x;
  } else {
    x = table.element(seq.inversion).to_matrix() * x;
  }
  return apply_spam(computational_probabilities(x), spam);
}

double survival_probability(const RBSequence& seq, const CliffordTable& table, const NoiseModel& noise,
                            const SpamModel& spam) {
  return outcome_probabilities(seq, table, noise, spam)[0];
}

double observable_value(Observable o, const std::array<double, 4>& p) {
  switch (o) {
    case Observable::P00: return p[0];
    case Observable::Qubit1: return p[0] + p[1];
    case Observable::Qubit2: return p[0] + p[2];
    case Observable::Parity: return p[0] + p[3];
  }
  return 0.0;
}

std::vector<double> DecayDataset::means() const {
  std::vector<double> out;
  for (const auto& row : values) {
    double sum = 0.0;
    for (const double v : row) sum += v;
    out.push_back(row.empty() ? 0.0 : sum / row.size());
  }
  return out;
}

std::vector<double> DecayDataset::standard_errors() const {
  std::vector<double> out;
  const auto m = means();
  for (std::size_t k = 0; k < values.size(); ++k) {
    const auto& row = values[k];
    if (row.size() < 2) {
      out.push_back(0.0);
      continue;
    }
    double ss = 0.0;
    for (const double v : row) ss += (v - m[k]) * (v - m[k]);
    out.push_back(std::sqrt(ss / (row.size() - 1) / row.size()));
  }
  return out;
}

FitResult fit_dataset(const DecayDataset& data, double b0) {
  std::vector<double> x(data.lengths.begin(), data.lengths.end());
  const auto y = data.means();
  auto err = data.standard_errors();
  if (*std::min_element(err.begin(), err.end()) < 1e-12) std::fill(err.begin(), err.end(), 1.0);
  FitOptions options;
  options.b0 = b0;
  return fit_decay(x, y, err, options);
}

std::vector<DecayDataset> run_campaign(const RBConfig& cfg, const CliffordTable& table,
                                       const NoiseModel& noise, const SpamModel& spam,
                                       const Campaign& campaign) {
  cfg.validate();
  spam.validate();
  if (noise.clifford.size() != table.size()) throw ValidationError("noise model does not match the table");
  const auto sequences = sample_sequences(cfg, table, campaign.spec);
  const std::size_t n_len = cfg.lengths.size();

  std::vector<std::vector<double>> results(sequences.size(), std::vector<double>(campaign.observables.size()));
  parallel_for(sequences.size(), cfg.threads, [&](std::size_t k) {
    const std::size_t s = k / n_len, l = k % n_len;
    auto probs = outcome_probabilities(sequences[k], table, noise, spam);
    if (cfg.shots) {
      auto rng = derived_stream(cfg.seed, campaign.spec.stream_tag, kShotStream,
                                static_cast<std::uint64_t>(cfg.lengths[l]), s);
      probs = sample_counts(probs, *cfg.shots, rng);
    }
    for (std::size_t o = 0; o < campaign.observables.size(); ++o)
      results[k][o] = std::clamp(observable_value(campaign.observables[o], probs), 0.0, 1.0);
  });

  std::vector<DecayDataset> out(campaign.observables.size());
  for (std::size_t o = 0; o < out.size(); ++o) {
    auto& d = out[o];
    d.protocol = o < campaign.observable_names.size() ? campaign.observable_names[o] : campaign.protocol;
    d.seed = cfg.seed;
    d.shots = cfg.shots;
    d.lengths = cfg.lengths;
    d.values.assign(n_len, std::vector<double>(cfg.sequences));
    for (std::size_t k = 0; k < sequences.size(); ++k) d.values[k % n_len][k / n_len] = results[k][o];
  }
  return out;
}

DecayDataset run_rb(const RBConfig& cfg, const CliffordTable& table, const NoiseModel& noise,
                    const SpamModel& spam) {
  Campaign c;
  c.protocol = "standard";
  return run_campaign(cfg, table, noise, spam, c).front();
}

DecayDataset run_interleaved(const RBConfig& cfg, const CliffordTable& table, const NoiseModel& noise,
                             const SpamModel& spam, std::size_t gate_index) {
  if (gate_index >= table.size()) throw ValidationError("interleaved gate is not in the Clifford table");
  Campaign c;
  c.protocol = "interleaved";
  c.spec.interleaved = gate_index;
  c.spec.stream_tag = 1;
  return run_campaign(cfg, table, noise, spam, c).front();
}

SimultaneousData run_simultaneous_1q(const RBConfig& cfg, const CliffordTable& table,
                                     const NoiseModel& noise, const SpamModel& spam) {
  Campaign ci, ic, cc;
  for (int a = 0; a < 24; ++a) {
    ci.spec.candidates.push_back(table.local_index(a, 0));
    ic.spec.candidates.push_back(table.local_index(0, a));
    for (int b = 0; b < 24; ++b) cc.spec.candidates.push_back(table.local_index(a, b));
  }
  ci.protocol = "sim_CI";
  ci.spec.stream_tag = 2;
  ci.observables = {Observable::Qubit1};
  ic.protocol = "sim_IC";
  ic.spec.stream_tag = 3;
  ic.observables = {Observable::Qubit2};
  cc.protocol = "sim_CC";
  cc.spec.stream_tag = 4;
  cc.observables = {Observable::Qubit1, Observable::Qubit2, Observable::Parity};
  cc.observable_names = {"sim_CC_1|2", "sim_CC_2|1", "sim_CC_12"};

  SimultaneousData out;
  out.q1 = run_campaign(cfg, table, noise, spam, ci).front();
  out.q2 = run_campaign(cfg, table, noise, spam, ic).front();
  auto joint = run_campaign(cfg, table, noise, spam, cc);
  out.cc_q1 = std::move(joint[0]);
  out.cc_q2 = std::move(joint[1]);
  out.cc_joint = std::move(joint[2]);
  return out;
}

SimultaneousAnalysis analyze_simultaneous(const SimultaneousData& data) {
  SimultaneousAnalysis a;
  a.alpha1 = fit_dataset(data.q1, 0.5);
  a.alpha2 = fit_dataset(data.q2, 0.5);
  a.alpha1_2 = fit_dataset(data.cc_q1, 0.5);
  a.alpha2_1 = fit_dataset(data.cc_q2, 0.5);
  a.alpha12 = fit_dataset(data.cc_joint, 0.5);
  a.r1 = error_per_clifford(a.alpha1.params.alpha, a.alpha1.sigma_alpha, 2);
  a.r2 = error_per_clifford(a.alpha2.params.alpha, a.alpha2.sigma_alpha, 2);
  a.r1_2 = error_per_clifford(a.alpha1_2.params.alpha, a.alpha1_2.sigma_alpha, 2);
  a.r2_1 = error_per_clifford(a.alpha2_1.params.alpha, a.alpha2_1.sigma_alpha, 2);
  a.delta = delta_alpha(a.alpha12.params.alpha, a.alpha12.sigma_alpha, a.alpha1_2.params.alpha,
                        a.alpha1_2.sigma_alpha, a.alpha2_1.params.alpha, a.alpha2_1.sigma_alpha);
  return a;
}

Ptm clifford_twirl(const CliffordTable& table, const Ptm& channel) {
  Ptm acc = Ptm::Zero();
  for (const auto& c : table.elements()) {
    for (int j = 0; j < 16; ++j)
      for (int i = 0; i < 16; ++i) acc(i, j) += c.sign[i] * c.sign[j] * channel(c.image[i], c.image[j]);
  }
  return acc / static_cast<double>(table.size());
}

double depolarizing_parameter(const Ptm& channel) { return (channel.trace() - 1.0) / 15.0; }

}  // namespace rbsim
