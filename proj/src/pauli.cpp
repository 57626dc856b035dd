#include "rbsim/pauli.hpp"

#include <cmath>
#include <sstream>

#include "rbsim/error.hpp"

namespace rbsim {
namespace {

constexpr char kLabelChars[4] = {'I', 'X', 'Y', 'Z'};

std::array<ComplexMatrix, 4> make_single_paulis() {
  const Complex i(0.0, 1.0);
  std::array<ComplexMatrix, 4> p;
  p[0] = ComplexMatrix::Identity(2, 2);
  p[1] = ComplexMatrix::Zero(2, 2);
  p[1](0, 1) = 1.0;
  p[1](1, 0) = 1.0;
  p[2] = ComplexMatrix::Zero(2, 2);
  p[2](0, 1) = -i;
  p[2](1, 0) = i;
  p[3] = ComplexMatrix::Zero(2, 2);
  p[3](0, 0) = 1.0;
  p[3](1, 1) = -1.0;
  return p;
}

std::array<ComplexMatrix, 16> make_two_qubit_paulis() {
  std::array<ComplexMatrix, 16> p;
  for (int k = 0; k < 16; ++k) p[k] = kron(pauli1(k / 4), pauli1(k % 4));
  return p;
}

}  // namespace

std::string PauliLabel::name() const {
  return {kLabelChars[first()], kLabelChars[second()]};
}

PauliLabel PauliLabel::parse(const std::string& name) {
  auto code = [&](char c) {
    for (int k = 0; k < 4; ++k)
      if (kLabelChars[k] == c) return k;
    throw ValidationError("invalid Pauli label '" + name + "'");
  };
  if (name.size() != 2) throw ValidationError("invalid Pauli label '" + name + "'");
  return PauliLabel(code(name[0]), code(name[1]));
}

const ComplexMatrix& pauli1(int label) {
  static const auto table = make_single_paulis();
  return table.at(label);
}

const ComplexMatrix& pauli2(int index) {
  static const auto table = make_two_qubit_paulis();
  return table.at(index);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const ComplexMatrix& h) {
  return max_abs(h - h.adjoint());
}

double unitarity_defect(const ComplexMatrix& u) {
  return max_abs(u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols()));
}

ComplexMatrix matexp_hermitian_generator(const ComplexMatrix& h, double t) {
  if (h.rows() != h.cols()) throw ValidationError("matexp: generator is not square");
  const double defect = hermiticity_defect(h);
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "matexp: generator is not Hermitian (max |h - h^dagger| = " << defect << ")";
    throw ValidationError(msg.str());
  }
  const ComplexMatrix hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(hs);
  const Eigen::VectorXd& w = eig.eigenvalues();
  const ComplexMatrix& v = eig.eigenvectors();
  Eigen::VectorXcd phases(w.size());
  for (Eigen::Index k = 0; k < w.size(); ++k) phases(k) = std::polar(1.0, -t * w(k));
  ComplexMatrix u = v * phases.asDiagonal() * v.adjoint();

  // One Newton-Schulz step pulls the result back onto the unitary manifold.
  const ComplexMatrix id = ComplexMatrix::Identity(u.rows(), u.cols());
  u = 0.5 * u * (3.0 * id - u.adjoint() * u);
  return u;
}

ComplexMatrix rotation(double nx, double ny, double nz, double angle) {
  const double norm = std::sqrt(nx * nx + ny * ny + nz * nz);
  const ComplexMatrix h =
      (nx * pauli1(1) + ny * pauli1(2) + nz * pauli1(3)) / (2.0 * norm);
  return matexp_hermitian_generator(h, angle);
}

Ptm unitary_to_ptm(const ComplexMatrix& u) {
  if (u.rows() != 4 || u.cols() != 4) throw ValidationError("unitary_to_ptm: expected a 4x4 matrix");
  const double defect = unitarity_defect(u);
  if (defect > 1e-10) {
    std::ostringstream msg;
    msg << "unitary_to_ptm: matrix is not unitary (max |U^dagger U - I| = " << defect << ")";
    throw ValidationError(msg.str());
  }
  Ptm r;
  std::array<ComplexMatrix, 16> images;
  for (int j = 0; j < 16; ++j) images[j] = u * pauli2(j) * u.adjoint();
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      r(i, j) = (pauli2(i).cwiseProduct(images[j].transpose())).sum().real() / 4.0;
  return r;
}

Eigen::Matrix4d single_qubit_ptm(const ComplexMatrix& u) {
  if (u.rows() != 2 || u.cols() != 2) throw ValidationError("single_qubit_ptm: expected a 2x2 matrix");
  Eigen::Matrix4d r;
  for (int j = 0; j < 4; ++j) {
    const ComplexMatrix image = u * pauli1(j) * u.adjoint();
    for (int i = 0; i < 4; ++i) r(i, j) = (pauli1(i) * image).trace().real() / 2.0;
  }
  return r;
}

Ptm kraus_to_ptm(std::span<const ComplexMatrix> kraus) {
  Ptm r = Ptm::Zero();
  for (int j = 0; j < 16; ++j) {
    ComplexMatrix image = ComplexMatrix::Zero(4, 4);
    for (const auto& k : kraus) image += k * pauli2(j) * k.adjoint();
    for (int i = 0; i < 16; ++i)
      r(i, j) = (pauli2(i).cwiseProduct(image.transpose())).sum().real() / 4.0;
  }
  return r;
}

Ptm ptm_compose(const Ptm& second, const Ptm& first) { return second * first; }

ComplexMatrix choi_from_ptm(const Ptm& r) {
  ComplexMatrix chi = ComplexMatrix::Zero(16, 16);
  for (int j = 0; j < 16; ++j) {
    const ComplexMatrix pj_t = pauli2(j).transpose();
    for (int i = 0; i < 16; ++i) {
      if (r(i, j) == 0.0) continue;
      chi += r(i, j) * kron(pj_t, pauli2(i));
    }
  }
  return chi / 16.0;
}

Ptm ptm_from_choi(const ComplexMatrix& choi) {
  if (choi.rows() != 16 || choi.cols() != 16) throw ValidationError("ptm_from_choi: expected a 16x16 matrix");
  Ptm r;
  for (int j = 0; j < 16; ++j) {
    const ComplexMatrix pj_t = pauli2(j).transpose();
    for (int i = 0; i < 16; ++i) {
      const ComplexMatrix basis = kron(pj_t, pauli2(i));
      r(i, j) = (choi.cwiseProduct(basis.transpose())).sum().real();
    }
  }
  return r;
}

ComplexMatrix choi_input_marginal(const ComplexMatrix& choi) {
  ComplexMatrix out = ComplexMatrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int k = 0; k < 4; ++k) out(a, b) += choi(4 * a + k, 4 * b + k);
  return out;
}

double avg_gate_fidelity(const Ptm& r, const Ptm& r_ideal) {
  constexpr double d = kHilbertDim;
  return ((r_ideal.transpose() * r).trace() + d) / (d * d + d);
}

Ptm depolarizing_ptm(double p) {
  Ptm r = Ptm::Identity() * p;
  r(0, 0) = 1.0;
  return r;
}

PauliVector pauli_vector(const ComplexMatrix& rho) {
  PauliVector x;
  for (int i = 0; i < 16; ++i) x(i) = (pauli2(i) * rho).trace().real();
  return x;
}

ComplexMatrix density_from_pauli_vector(const PauliVector& x) {
  ComplexMatrix rho = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 16; ++i) rho += x(i) * pauli2(i);
  return rho / 4.0;
}

std::array<double, 4> computational_probabilities(const PauliVector& x) {
  using namespace labels;
  std::array<double, 4> p{};
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const double sa = a ? -1.0 : 1.0;
      const double sb = b ? -1.0 : 1.0;
      p[2 * a + b] = (x(II) + sb * x(IZ) + sa * x(ZI) + sa * sb * x(ZZ)) / 4.0;
    }
  }
  return p;
}

}  // namespace rbsim
