#include "rbsim/clifford.hpp"

#include <algorithm>
#include <deque>
#include <numbers>
#include <random>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

using std::numbers::pi;

std::string key_string(const SignedPauliPerm& p) {
  std::ostringstream out;
  out << "perm=[";
  for (int k = 1; k < 16; ++k) out << (k > 1 ? "," : "") << int(p.image[k]);
  out << "] signs=[";
  for (int k = 1; k < 16; ++k) out << (k > 1 ? "," : "") << int(p.sign[k]);
  out << "]";
  return out.str();
}

// Splits a two-qubit element into single-qubit factors when it is local.
std::optional<std::pair<SingleQubitPerm, SingleQubitPerm>> local_factors(const SignedPauliPerm& c) {
  SingleQubitPerm first = SingleQubitPerm::identity();
  SingleQubitPerm second = SingleQubitPerm::identity();
  for (int k = 1; k < 4; ++k) {
    const PauliLabel on_second(c.image[k]);
    const PauliLabel on_first(c.image[4 * k]);
    if (on_second.first() != 0 || on_first.second() != 0) return std::nullopt;
    second.image[k] = static_cast<std::uint8_t>(on_second.second());
    second.sign[k] = c.sign[k];
    first.image[k] = static_cast<std::uint8_t>(on_first.first());
    first.sign[k] = c.sign[4 * k];
  }
  if (tensor(first, second) != c) return std::nullopt;
  return std::make_pair(first, second);
}

SignedPauliPerm layers_perm(const std::vector<Layer>& layers) {
  SignedPauliPerm acc = SignedPauliPerm::identity();
  for (const auto& layer : layers) acc = compose(layer_perm(layer), acc);
  return acc;
}

// Two words played side by side, the shorter padded with identities.
void append_parallel(std::vector<Layer>& layers, const std::vector<Gate1>& first,
                     const std::vector<Gate1>& second) {
  const std::size_t depth = std::max(first.size(), second.size());
  for (std::size_t k = 0; k < depth; ++k) {
    layers.push_back(Layer::local(k < first.size() ? first[k] : Gate1::I,
                                  k < second.size() ? second[k] : Gate1::I));
  }
}

int word_cost(const SingleQubitPerm& p) {
  return static_cast<int>(enumerate_c1()[c1_index(p)].word.size());
}

// G = L . core . R with L, R local. Among all such splittings, keep the one
// whose post-rotations (s_a (x) s_b) . L are cheapest on average.
struct Splitting {
  SingleQubitPerm left1, left2, right1, right2;
};

Splitting split_entangler(const SignedPauliPerm& gate, const SignedPauliPerm& core, bool with_s1) {
  const auto& c1 = enumerate_c1();
  const auto s1 = s1_group();
  std::optional<Splitting> best;
  int best_cost = 0;
  for (const auto& r1 : c1) {
    for (const auto& r2 : c1) {
      const SignedPauliPerm right = tensor(r1.perm, r2.perm);
      const SignedPauliPerm left = compose(gate, invert(compose(core, right)));
      const auto factors = local_factors(left);
      if (!factors) continue;
      int cost = 0;
      if (with_s1) {
        for (const auto& s : s1) {
          cost += word_cost(compose(s, factors->first));
          cost += word_cost(compose(s, factors->second));
        }
      } else {
        cost = word_cost(factors->first) + word_cost(factors->second);
      }
      if (!best || cost < best_cost) {
        best = Splitting{factors->first, factors->second, r1.perm, r2.perm};
        best_cost = cost;
      }
    }
  }
  if (!best) throw ValidationError("core circuit is not locally equivalent to its target gate");
  return *best;
}

ComplexMatrix matrix4(std::initializer_list<Complex> values) {
  ComplexMatrix m(4, 4);
  auto it = values.begin();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m(i, j) = *it++;
  return m;
}

}  // namespace

std::size_t SignedPauliPermHash::operator()(const SignedPauliPerm& p) const noexcept {
  std::uint64_t h = 1469598103934665603ull;
  for (int k = 1; k < 16; ++k) {
    h = (h ^ p.image[k]) * 1099511628211ull;
    h = (h ^ static_cast<std::uint8_t>(p.sign[k])) * 1099511628211ull;
  }
  return static_cast<std::size_t>(h);
}

SignedPauliPerm tensor(const SingleQubitPerm& a, const SingleQubitPerm& b) {
  SignedPauliPerm out;
  for (int j = 0; j < 16; ++j) {
    const PauliLabel label(j);
    out.image[j] = static_cast<std::uint8_t>(PauliLabel(a.image[label.first()], b.image[label.second()]).index());
    out.sign[j] = static_cast<std::int8_t>(a.sign[label.first()] * b.sign[label.second()]);
  }
  return out;
}

SignedPauliPerm perm_from_unitary(const ComplexMatrix& u) {
  const auto p = SignedPauliPerm::from_matrix(unitary_to_ptm(u));
  if (!p) throw ValidationError("unitary is not a two-qubit Clifford");
  return *p;
}

SingleQubitPerm single_perm_from_unitary(const ComplexMatrix& u) {
  const auto p = SingleQubitPerm::from_matrix(single_qubit_ptm(u));
  if (!p) throw ValidationError("unitary is not a single-qubit Clifford");
  return *p;
}

std::string gate_name(Gate1 g) {
  switch (g) {
    case Gate1::I: return "I";
    case Gate1::Xp2: return "X+90";
    case Gate1::Xm2: return "X-90";
    case Gate1::Yp2: return "Y+90";
    case Gate1::Ym2: return "Y-90";
    case Gate1::Xpi: return "X180";
    case Gate1::Ypi: return "Y180";
  }
  return "?";
}

ComplexMatrix gate_unitary(Gate1 g) {
  switch (g) {
    case Gate1::I: return ComplexMatrix::Identity(2, 2);
    case Gate1::Xp2: return rotation(1, 0, 0, pi / 2);
    case Gate1::Xm2: return rotation(1, 0, 0, -pi / 2);
    case Gate1::Yp2: return rotation(0, 1, 0, pi / 2);
    case Gate1::Ym2: return rotation(0, 1, 0, -pi / 2);
    case Gate1::Xpi: return rotation(1, 0, 0, pi);
    case Gate1::Ypi: return rotation(0, 1, 0, pi);
  }
  throw ValidationError("unknown gate");
}

SingleQubitPerm gate_perm(Gate1 g) {
  static const auto table = [] {
    std::array<SingleQubitPerm, 7> t;
    for (auto gate : kGate1Alphabet)
      t[static_cast<int>(gate)] = single_perm_from_unitary(gate_unitary(gate));
    return t;
  }();
  return table[static_cast<int>(g)];
}

ComplexMatrix zx_m90_unitary() {
  return matexp_hermitian_generator(pauli2(labels::ZX), -pi / 4);
}

SignedPauliPerm zx_m90_perm() {
  static const SignedPauliPerm p = perm_from_unitary(zx_m90_unitary());
  return p;
}

SignedPauliPerm layer_perm(const Layer& layer) {
  if (layer.entangling) return zx_m90_perm();
  return tensor(gate_perm(layer.q1), gate_perm(layer.q2));
}

ComplexMatrix layer_unitary(const Layer& layer) {
  if (layer.entangling) return zx_m90_unitary();
  return kron(gate_unitary(layer.q1), gate_unitary(layer.q2));
}

std::string class_name(CliffordClass c) {
  switch (c) {
    case CliffordClass::SingleQubit: return "single-qubit";
    case CliffordClass::CnotLike: return "cnot-like";
    case CliffordClass::IswapLike: return "iswap-like";
    case CliffordClass::SwapLike: return "swap-like";
  }
  return "?";
}

int CliffordCircuit::two_qubit_count() const {
  return static_cast<int>(std::count_if(layers.begin(), layers.end(),
                                        [](const Layer& l) { return l.entangling; }));
}

int CliffordCircuit::single_qubit_count(bool include_identity) const {
  int n = 0;
  for (const auto& l : layers) {
    if (l.entangling) continue;
    n += (include_identity || l.q1 != Gate1::I) ? 1 : 0;
    n += (include_identity || l.q2 != Gate1::I) ? 1 : 0;
  }
  return n;
}

SignedPauliPerm CliffordCircuit::recompose() const { return layers_perm(layers); }

const std::vector<SingleQubitClifford>& enumerate_c1() {
  static const std::vector<SingleQubitClifford> group = [] {
    std::vector<SingleQubitClifford> out;
    out.push_back({SingleQubitPerm::identity(), {}});
    for (std::size_t head = 0; head < out.size(); ++head) {
      for (auto g : kGate1Alphabet) {
        if (g == Gate1::I) continue;
        const SingleQubitPerm next = compose(gate_perm(g), out[head].perm);
        const bool known = std::any_of(out.begin(), out.end(),
                                       [&](const SingleQubitClifford& c) { return c.perm == next; });
        if (known) continue;
        auto word = out[head].word;
        word.push_back(g);
        out.push_back({next, std::move(word)});
      }
    }
    return out;
  }();
  return group;
}

int c1_index(const SingleQubitPerm& p) {
  const auto& group = enumerate_c1();
  for (std::size_t k = 0; k < group.size(); ++k)
    if (group[k].perm == p) return static_cast<int>(k);
  throw ValidationError("element is not a single-qubit Clifford");
}

std::array<SingleQubitPerm, 3> s1_group() {
  SingleQubitPerm rs = SingleQubitPerm::identity();
  rs.image = {0, 2, 3, 1};  // X -> Y, Y -> Z, Z -> X
  return {SingleQubitPerm::identity(), rs, compose(rs, rs)};
}

CliffordTable CliffordTable::build() {
  const auto& c1 = enumerate_c1();
  const auto s1 = s1_group();
  CliffordTable table;
  table.elements_.reserve(kSize);
  table.circuits_.reserve(kSize);

  auto insert = [&](const SignedPauliPerm& element, CliffordCircuit circuit) {
    const auto [it, fresh] = table.index_.emplace(element, table.elements_.size());
    if (!fresh) {
      throw ValidationError("duplicate Clifford in class " + class_name(circuit.cls) +
                            " (already in class " + class_name(table.circuits_[it->second].cls) +
                            "): " + key_string(element));
    }
    table.elements_.push_back(element);
    table.circuits_.push_back(std::move(circuit));
  };

  for (const auto& a : c1) {
    for (const auto& b : c1) {
      CliffordCircuit circuit{{}, CliffordClass::SingleQubit};
      append_parallel(circuit.layers, a.word, b.word);
      insert(tensor(a.perm, b.perm), std::move(circuit));
    }
  }

  const Complex i(0.0, 1.0);
  const SignedPauliPerm cnot = perm_from_unitary(matrix4({1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0}));
  const SignedPauliPerm iswap = perm_from_unitary(matrix4({1, 0, 0, 0, 0, 0, i, 0, 0, i, 0, 0, 0, 0, 0, 1}));
  const SignedPauliPerm swap = perm_from_unitary(matrix4({1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1}));

  // ZX_{-pi/2} replacement circuits for the three entangling classes.
  const std::vector<Layer> cnot_core = {Layer::zx()};
  const std::vector<Layer> iswap_core = {Layer::zx(), Layer::local(Gate1::Ym2, Gate1::Ym2), Layer::zx()};
  const std::vector<Layer> swap_core = {Layer::zx(),
                                        Layer::local(Gate1::Ym2, Gate1::Ym2),
                                        Layer::zx(),
                                        Layer::local(Gate1::Xp2, Gate1::Xp2),
                                        Layer::local(Gate1::I, Gate1::Ym2),
                                        Layer::zx()};

  struct EntanglingClass {
    CliffordClass cls;
    SignedPauliPerm gate;
    const std::vector<Layer>* core;
    bool with_s1;
  };
  const std::array<EntanglingClass, 3> classes = {{
      {CliffordClass::CnotLike, cnot, &cnot_core, true},
      {CliffordClass::IswapLike, iswap, &iswap_core, true},
      {CliffordClass::SwapLike, swap, &swap_core, false},
  }};

  for (const auto& ec : classes) {
    const Splitting split = split_entangler(ec.gate, layers_perm(*ec.core), ec.with_s1);
    const std::size_t posts = ec.with_s1 ? s1.size() : 1;
    for (const auto& a : c1) {
      for (const auto& b : c1) {
        const SingleQubitPerm pre1 = compose(split.right1, a.perm);
        const SingleQubitPerm pre2 = compose(split.right2, b.perm);
        for (std::size_t sa = 0; sa < posts; ++sa) {
          for (std::size_t sb = 0; sb < posts; ++sb) {
            const SingleQubitPerm post1 = compose(s1[sa], split.left1);
            const SingleQubitPerm post2 = compose(s1[sb], split.left2);
            const SignedPauliPerm element =
                compose(tensor(s1[sa], s1[sb]), compose(ec.gate, tensor(a.perm, b.perm)));

            CliffordCircuit circuit{{}, ec.cls};
            append_parallel(circuit.layers, c1[c1_index(pre1)].word, c1[c1_index(pre2)].word);
            circuit.layers.insert(circuit.layers.end(), ec.core->begin(), ec.core->end());
            append_parallel(circuit.layers, c1[c1_index(post1)].word, c1[c1_index(post2)].word);
            insert(element, std::move(circuit));
          }
        }
      }
    }
  }

  const auto sizes = table.class_sizes();
  const std::array<std::size_t, 4> expected = {576, 5184, 5184, 576};
  for (int k = 0; k < 4; ++k) {
    if (sizes[k] != expected[k]) {
      throw ValidationError("class " + class_name(static_cast<CliffordClass>(k)) + " has " +
                            std::to_string(sizes[k]) + " elements, expected " +
                            std::to_string(expected[k]));
    }
  }
  return table;
}

std::optional<std::size_t> CliffordTable::find(const SignedPauliPerm& c) const {
  const auto it = index_.find(c);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t CliffordTable::lookup(const SignedPauliPerm& c) const {
  if (const auto idx = find(c)) return *idx;
  throw ValidationError("not a two-qubit Clifford: " + key_string(c));
}

std::array<std::size_t, 4> CliffordTable::class_sizes() const {
  std::array<std::size_t, 4> sizes{};
  for (const auto& c : circuits_) ++sizes[static_cast<int>(c.cls)];
  return sizes;
}

CliffordTable CliffordTable::with_corrupted_sign(std::size_t index, int label) const {
  CliffordTable copy = *this;
  auto& sign = copy.elements_.at(index).sign.at(label);
  sign = static_cast<std::int8_t>(-sign);
  copy.index_.clear();
  for (std::size_t k = 0; k < copy.elements_.size(); ++k) copy.index_.emplace(copy.elements_[k], k);
  return copy;
}

const CliffordTable& two_qubit_cliffords() {
  static const CliffordTable table = CliffordTable::build();
  return table;
}

const CliffordCircuit& decompose(std::size_t index, const CliffordTable& table) {
  return table.circuit(index);
}

GateCountStats gate_count_stats(const CliffordTable& table) {
  GateCountStats stats;
  stats.class_sizes = table.class_sizes();
  std::size_t two = 0, single = 0, single_idle = 0;
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto& c = table.circuit(k);
    two += c.two_qubit_count();
    const auto n = static_cast<std::size_t>(c.single_qubit_count(false));
    single += n;
    single_idle += c.single_qubit_count(true);
    if (stats.single_qubit_histogram.size() <= n) stats.single_qubit_histogram.resize(n + 1);
    ++stats.single_qubit_histogram[n];
  }
  const double total = static_cast<double>(table.size());
  stats.mean_two_qubit = two / total;
  stats.mean_single_qubit = single / total;
  stats.mean_single_qubit_with_idle = single_idle / total;
  return stats;
}

VerificationReport verify_table(const CliffordTable& table, std::size_t closure_trials,
                                std::uint64_t seed) {
  VerificationReport report;
  auto fail = [&](std::string message) {
    report.ok = false;
    if (report.failures.size() < 20) report.failures.push_back(std::move(message));
  };

  if (table.size() != CliffordTable::kSize)
    fail("table has " + std::to_string(table.size()) + " elements, expected 11520");

  const auto sizes = table.class_sizes();
  const std::array<std::size_t, 4> expected = {576, 5184, 5184, 576};
  for (int k = 0; k < 4; ++k) {
    if (sizes[k] != expected[k])
      fail("class " + class_name(static_cast<CliffordClass>(k)) + " has " + std::to_string(sizes[k]) +
           " elements");
  }

  const SignedPauliPerm id = SignedPauliPerm::identity();
  for (std::size_t k = 0; k < table.size(); ++k) {
    const auto& c = table.element(k);
    if (!c.is_signed_permutation()) {
      fail("element " + std::to_string(k) + " is not a signed permutation");
      continue;
    }
    if (table.find(c) != k) fail("element " + std::to_string(k) + " is not uniquely indexed");
    const SignedPauliPerm inv = invert(c);
    if (!table.find(inv) || compose(c, inv) != id)
      fail("element " + std::to_string(k) + " has no inverse in the table");
    if (table.circuit(k).recompose() != c)
      fail("element " + std::to_string(k) + " does not match its circuit");
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, table.size() - 1);
  for (std::size_t t = 0; t < closure_trials; ++t) {
    const std::size_t a = pick(rng), b = pick(rng);
    if (!table.find(compose(table.element(a), table.element(b))))
      fail("product of elements " + std::to_string(a) + " and " + std::to_string(b) + " is not in the table");
  }
  report.closure_trials = closure_trials;

  const auto stats = gate_count_stats(table);
  if (stats.mean_two_qubit != 1.5) fail("mean two-qubit gate count is " + std::to_string(stats.mean_two_qubit));
  if (stats.mean_single_qubit < 3.8)
    fail("mean single-qubit gate count is " + std::to_string(stats.mean_single_qubit));
  return report;
}

}  // namespace rbsim
