#pragma once

// Reference implementations used only by the tests. Nothing here calls into
// the library, so the library can be checked against it.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

inline Mat pauli(int k) {
  Mat m(2, 2);
  const C i(0.0, 1.0);
  switch (k) {
    case 0: m << 1, 0, 0, 1; break;
    case 1: m << 0, 1, 1, 0; break;
    case 2: m << 0, -i, i, 0; break;
    default: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int k = 0; k < b.rows(); ++k)
        for (int l = 0; l < b.cols(); ++l) out(i * b.rows() + k, j * b.cols() + l) = a(i, j) * b(k, l);
  return out;
}

inline Mat pauli2(int index) { return kron(pauli(index / 4), pauli(index % 4)); }

// exp(a) by scaling and squaring of a truncated Taylor series.
inline Mat expm_taylor(const Mat& a) {
  int squarings = 0;
  double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  while (norm > 0.1) {
    norm /= 2.0;
    ++squarings;
  }
  const Mat scaled = a / std::pow(2.0, squarings);
  Mat term = Mat::Identity(a.rows(), a.cols());
  Mat sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

// R_ij = Tr(P_i sum_k K_k P_j K_k^dagger) / 4 evaluated term by term.
inline RMat ptm_brute(const std::vector<Mat>& kraus) {
  RMat r(16, 16);
  for (int i = 0; i < 16; ++i) {
    for (int j = 0; j < 16; ++j) {
      C acc = 0.0;
      for (const auto& k : kraus) acc += (pauli2(i) * k * pauli2(j) * k.adjoint()).trace();
      r(i, j) = acc.real() / 4.0;
    }
  }
  return r;
}

inline RMat ptm_brute(const Mat& u) { return ptm_brute(std::vector<Mat>{u}); }

inline Mat random_complex(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> n;
  Mat m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = C(n(rng), n(rng));
  return m;
}

inline Mat random_hermitian(std::mt19937_64& rng, int dim) {
  const Mat g = random_complex(rng, dim, dim);
  return (g + g.adjoint()) / 2.0;
}

// Haar-like unitary from the QR factor of a complex Gaussian matrix.
inline Mat random_unitary(std::mt19937_64& rng, int dim) {
  const Mat g = random_complex(rng, dim, dim);
  Eigen::HouseholderQR<Mat> qr(g);
  Mat q = qr.householderQ() * Mat::Identity(dim, dim);
  const Mat r = qr.matrixQR();
  for (int k = 0; k < dim; ++k) q.col(k) *= std::polar(1.0, -std::arg(r(k, k)));
  return q;
}

// Kraus operators of a random CPTP map: blocks of a random isometry.
inline std::vector<Mat> random_kraus(std::mt19937_64& rng, int count) {
  const Mat g = random_complex(rng, 4 * count, 4);
  Eigen::HouseholderQR<Mat> qr(g);
  const Mat v = qr.householderQ() * Mat::Identity(4 * count, 4);
  std::vector<Mat> out;
  for (int k = 0; k < count; ++k) out.push_back(v.block(4 * k, 0, 4, 4));
  return out;
}

}  // namespace oracle
