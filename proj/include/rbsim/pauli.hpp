#pragma once

// Dense complex linear algebra and Pauli-basis superoperators for two qubits.
//
// Pauli labels are indexed as 4 * (first-qubit label) + (second-qubit label)
// with I=0, X=1, Y=2, Z=3, so index 0 is II and index 15 is ZZ. The first
// qubit is the left Kronecker factor, i.e. the most significant bit of a
// computational basis index.
//
// Pauli transfer matrices use unnormalized Paulis:
//   R_ij = Tr(P_i L(P_j)) / d,   d = 4,
// which makes Clifford PTMs exact signed permutation matrices.

#include <array>
#include <complex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rbsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Ptm = Eigen::Matrix<double, 16, 16>;
using PauliVector = Eigen::Matrix<double, 16, 1>;

inline constexpr int kHilbertDim = 4;
inline constexpr int kPauliCount = 16;

// One two-qubit Pauli operator label.
class PauliLabel {
 public:
  constexpr PauliLabel() = default;
  constexpr explicit PauliLabel(int index) : index_(index) {}
  constexpr PauliLabel(int first, int second) : index_(4 * first + second) {}

  constexpr int index() const { return index_; }
  constexpr int first() const { return index_ / 4; }
  constexpr int second() const { return index_ % 4; }

  // "II", "IX", ..., "ZZ".
  std::string name() const;
  static PauliLabel parse(const std::string& name);

  friend constexpr bool operator==(PauliLabel, PauliLabel) = default;

 private:
  int index_ = 0;
};

// Named label indices used throughout the simulator.
namespace labels {
inline constexpr int II = 0, IX = 1, IY = 2, IZ = 3;
inline constexpr int XI = 4, XX = 5, XY = 6, XZ = 7;
inline constexpr int YI = 8, YX = 9, YY = 10, YZ = 11;
inline constexpr int ZI = 12, ZX = 13, ZY = 14, ZZ = 15;
}  // namespace labels

// 2x2 single-qubit Pauli, label in {0: I, 1: X, 2: Y, 3: Z}.
const ComplexMatrix& pauli1(int label);
// 4x4 two-qubit Pauli for a label index in [0, 16).
const ComplexMatrix& pauli2(int index);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Max-norm distances used as property checks.
double hermiticity_defect(const ComplexMatrix& h);
double unitarity_defect(const ComplexMatrix& u);
double max_abs(const ComplexMatrix& m);

// exp(-i t h) for Hermitian h, via eigendecomposition. Throws
// ValidationError when h is not Hermitian within 1e-10.
ComplexMatrix matexp_hermitian_generator(const ComplexMatrix& h, double t);

// Single-qubit rotation exp(-i angle (n . sigma) / 2).
ComplexMatrix rotation(double nx, double ny, double nz, double angle);

// PTM of the 4x4 unitary u; throws ValidationError if u is not unitary.
Ptm unitary_to_ptm(const ComplexMatrix& u);
// 4x4 single-qubit PTM of a 2x2 unitary.
Eigen::Matrix4d single_qubit_ptm(const ComplexMatrix& u);
// PTM of a channel given by Kraus operators (4x4 each).
Ptm kraus_to_ptm(std::span<const ComplexMatrix> kraus);

// Apply `first`, then `second`.
Ptm ptm_compose(const Ptm& second, const Ptm& first);

// Choi matrix chi = (1/16) sum_ij R_ij (P_j^T (x) P_i), input factor first,
// normalized to unit trace.
ComplexMatrix choi_from_ptm(const Ptm& r);
Ptm ptm_from_choi(const ComplexMatrix& choi);
// Partial trace of a 16x16 Choi matrix over its output factor.
ComplexMatrix choi_input_marginal(const ComplexMatrix& choi);

// Average gate fidelity (Tr(R_ideal^T R) + d) / (d^2 + d). Not clamped.
double avg_gate_fidelity(const Ptm& r, const Ptm& r_ideal);

// Depolarizing channel: identity on II, p on the 15 other labels.
Ptm depolarizing_ptm(double p);

// Pauli vector x_i = Tr(P_i rho) of a 4x4 density matrix, and back.
PauliVector pauli_vector(const ComplexMatrix& rho);
ComplexMatrix density_from_pauli_vector(const PauliVector& x);

// Outcome probabilities over {00, 01, 10, 11} of a state in Pauli form.
std::array<double, 4> computational_probabilities(const PauliVector& x);

}  // namespace rbsim
