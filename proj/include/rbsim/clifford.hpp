#pragma once

// Exact single- and two-qubit Clifford groups as signed Pauli permutations.
//
// A Clifford C is stored through its conjugation action
//   C P_j C^dagger = sign[j] * P_{image[j]},
// with label 0 (identity) fixed. Composition and inversion use integer
// arithmetic only, so lookup, inversion and recomposition are exact.

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rbsim/pauli.hpp"

namespace rbsim {

template <int N>
struct SignedPerm {
  std::array<std::uint8_t, N> image{};
  std::array<std::int8_t, N> sign{};

  static SignedPerm identity() {
    SignedPerm p;
    for (int k = 0; k < N; ++k) {
      p.image[k] = static_cast<std::uint8_t>(k);
      p.sign[k] = 1;
    }
    return p;
  }

  // Bijection on 1..N-1 with label 0 fixed at sign +1, signs all +-1.
  bool is_signed_permutation() const {
    std::array<bool, N> seen{};
    if (image[0] != 0 || sign[0] != 1) return false;
    for (int k = 0; k < N; ++k) {
      if (image[k] >= N || seen[image[k]]) return false;
      if (sign[k] != 1 && sign[k] != -1) return false;
      seen[image[k]] = true;
    }
    return true;
  }

  Eigen::Matrix<double, N, N> to_matrix() const {
    Eigen::Matrix<double, N, N> m = Eigen::Matrix<double, N, N>::Zero();
    for (int j = 0; j < N; ++j) m(image[j], j) = sign[j];
    return m;
  }

  // Round an (orthogonal, monomial) transfer matrix to its exact form.
  static std::optional<SignedPerm> from_matrix(const Eigen::Matrix<double, N, N>& m,
                                               double tol = 1e-9) {
    SignedPerm p;
    for (int j = 0; j < N; ++j) {
      int hits = 0;
      for (int i = 0; i < N; ++i) {
        const double v = m(i, j);
        if (std::abs(v) < tol) continue;
        if (std::abs(std::abs(v) - 1.0) > tol) return std::nullopt;
        p.image[j] = static_cast<std::uint8_t>(i);
        p.sign[j] = v > 0 ? 1 : -1;
        ++hits;
      }
      if (hits != 1) return std::nullopt;
    }
    if (!p.is_signed_permutation()) return std::nullopt;
    return p;
  }

  friend bool operator==(const SignedPerm&, const SignedPerm&) = default;
};

// Apply b, then a.
template <int N>
SignedPerm<N> compose(const SignedPerm<N>& a, const SignedPerm<N>& b) {
  SignedPerm<N> out;
  for (int j = 0; j < N; ++j) {
    const int mid = b.image[j];
    out.image[j] = a.image[mid];
    out.sign[j] = static_cast<std::int8_t>(b.sign[j] * a.sign[mid]);
  }
  return out;
}

template <int N>
SignedPerm<N> invert(const SignedPerm<N>& c) {
  SignedPerm<N> out;
  for (int j = 0; j < N; ++j) {
    out.image[c.image[j]] = static_cast<std::uint8_t>(j);
    out.sign[c.image[j]] = c.sign[j];
  }
  return out;
}

using SignedPauliPerm = SignedPerm<16>;
// Single-qubit element on {I, X, Y, Z}; the 3-label Pauli domain plus I.
using SingleQubitPerm = SignedPerm<4>;

struct SignedPauliPermHash {
  std::size_t operator()(const SignedPauliPerm& p) const noexcept;
};

// Two-qubit element acting as a on qubit 1 and b on qubit 2.
SignedPauliPerm tensor(const SingleQubitPerm& a, const SingleQubitPerm& b);

// Exact form of a Clifford unitary; throws ValidationError for non-Cliffords.
SignedPauliPerm perm_from_unitary(const ComplexMatrix& u);
SingleQubitPerm single_perm_from_unitary(const ComplexMatrix& u);

// ---------------------------------------------------------------------------
// Generator alphabet

// Single-qubit generators, listed in lexicographic tie-break order.
enum class Gate1 : std::uint8_t { I, Xp2, Xm2, Yp2, Ym2, Xpi, Ypi };
inline constexpr std::array<Gate1, 7> kGate1Alphabet = {
    Gate1::I, Gate1::Xp2, Gate1::Xm2, Gate1::Yp2, Gate1::Ym2, Gate1::Xpi, Gate1::Ypi};

std::string gate_name(Gate1 g);
ComplexMatrix gate_unitary(Gate1 g);
SingleQubitPerm gate_perm(Gate1 g);

// ZX_{-pi/2} = exp(+i pi ZX / 4), with ZX_theta = exp(-i theta ZX / 2).
ComplexMatrix zx_m90_unitary();
SignedPauliPerm zx_m90_perm();

// One time step of a compiled circuit: either a pair of simultaneous
// single-qubit generators or the two-qubit ZX_{-pi/2}.
struct Layer {
  bool entangling = false;
  Gate1 q1 = Gate1::I;
  Gate1 q2 = Gate1::I;

  static Layer zx() { return {true, Gate1::I, Gate1::I}; }
  static Layer local(Gate1 a, Gate1 b) { return {false, a, b}; }
  friend bool operator==(const Layer&, const Layer&) = default;
};

SignedPauliPerm layer_perm(const Layer& layer);
ComplexMatrix layer_unitary(const Layer& layer);

enum class CliffordClass : std::uint8_t { SingleQubit, CnotLike, IswapLike, SwapLike };
std::string class_name(CliffordClass c);

struct CliffordCircuit {
  std::vector<Layer> layers;
  CliffordClass cls = CliffordClass::SingleQubit;

  int two_qubit_count() const;
  // Single-qubit generators; identity slots are counted only on request.
  int single_qubit_count(bool include_identity) const;
  // Exact product of the layers, applied in order.
  SignedPauliPerm recompose() const;
};

// ---------------------------------------------------------------------------
// Single-qubit group

struct SingleQubitClifford {
  SingleQubitPerm perm;
  std::vector<Gate1> word;  // time order; shortest over the alphabet
};

// The 24 single-qubit Cliffords in BFS discovery order (identity first).
const std::vector<SingleQubitClifford>& enumerate_c1();
// Index into enumerate_c1(); throws ValidationError if absent.
int c1_index(const SingleQubitPerm& p);

// {identity, R_S, R_S^2}, R_S the cyclic axis exchange x -> y -> z -> x.
std::array<SingleQubitPerm, 3> s1_group();

// ---------------------------------------------------------------------------
// Two-qubit group

class CliffordTable {
 public:
  static constexpr std::size_t kSize = 11520;

  // Enumerates the four classes, deduplicates, attaches compiled circuits.
  // Throws ValidationError on any class-size mismatch or duplicate.
  static CliffordTable build();

  std::size_t size() const { return elements_.size(); }
  const SignedPauliPerm& element(std::size_t index) const { return elements_.at(index); }
  const CliffordCircuit& circuit(std::size_t index) const { return circuits_.at(index); }
  CliffordClass class_of(std::size_t index) const { return circuits_.at(index).cls; }
  const std::vector<SignedPauliPerm>& elements() const { return elements_; }

  std::optional<std::size_t> find(const SignedPauliPerm& c) const;
  // Throws ValidationError for inputs that are not group elements.
  std::size_t lookup(const SignedPauliPerm& c) const;

  std::size_t identity_index() const { return 0; }
  // Index of c1[a] (x) c1[b]; the single-qubit class occupies [0, 576).
  std::size_t local_index(int a, int b) const { return static_cast<std::size_t>(24 * a + b); }

  std::array<std::size_t, 4> class_sizes() const;

  // Copy with one sign flipped in the stored element (verification hook).
  CliffordTable with_corrupted_sign(std::size_t index, int label) const;

 private:
  std::vector<SignedPauliPerm> elements_;
  std::vector<CliffordCircuit> circuits_;
  std::unordered_map<SignedPauliPerm, std::size_t, SignedPauliPermHash> index_;
};

// Shared, lazily built table.
const CliffordTable& two_qubit_cliffords();

const CliffordCircuit& decompose(std::size_t index, const CliffordTable& table);

struct GateCountStats {
  std::array<std::size_t, 4> class_sizes{};
  double mean_two_qubit = 0.0;
  double mean_single_qubit = 0.0;           // identities excluded
  double mean_single_qubit_with_idle = 0.0;  // identities included
  std::vector<std::size_t> single_qubit_histogram;  // identities excluded
};
GateCountStats gate_count_stats(const CliffordTable& table);

struct VerificationReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::size_t closure_trials = 0;
};
// Exact checks: size, class populations, closure on random products,
// inverses for every element, and circuit recomposition for every element.
VerificationReport verify_table(const CliffordTable& table, std::size_t closure_trials = 10000,
                                std::uint64_t seed = 1);

}  // namespace rbsim
