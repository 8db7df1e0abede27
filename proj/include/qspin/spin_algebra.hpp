#pragma once

// Spin-S matrix representations and basic matrix-algebra primitives.
//
// Basis convention: the standard basis |S>, |S-1>, ..., |-S>, so S3 is
// diag(S, S-1, ..., -S) and the ladder coefficient c_S sits in the top-left
// corner of the first superdiagonal of S+.

#include <cmath>
#include <string>

#include "qspin/errors.hpp"
#include "qspin/lanczos.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"

namespace qspin {

/// Spin quantum number stored as 2S so half-integers stay exact.
class SpinQuantumNumber {
 public:
  explicit constexpr SpinQuantumNumber(int two_s) : two_s_(two_s) {
    if (two_s < 1) throw DomainError("spin must satisfy 2S >= 1, got 2S=" + std::to_string(two_s));
  }

  static SpinQuantumNumber from_local_dim(Index n) {
    return SpinQuantumNumber(static_cast<int>(n) - 1);
  }

  constexpr int two_s() const { return two_s_; }
  constexpr double value() const { return 0.5 * two_s_; }
  constexpr Index dim() const { return two_s_ + 1; }
  constexpr double casimir() const { return value() * (value() + 1.0); }

  friend constexpr bool operator==(SpinQuantumNumber, SpinQuantumNumber) = default;

 private:
  int two_s_;
};

inline constexpr SpinQuantumNumber kSpinHalf{1};
inline constexpr SpinQuantumNumber kSpinOne{2};

struct SpinOperators {
  SpinQuantumNumber spin;
  DenseMatrix s1, s2, s3, sp, sm, identity;

  const DenseMatrix& component(int axis) const {
    switch (axis) {
      case 1: return s1;
      case 2: return s2;
      case 3: return s3;
      default: throw DomainError("spin component axis must be 1, 2 or 3");
    }
  }
};

/// c_m = sqrt(S(S+1) - m(m-1)), with m passed as 2m.
inline double ladder_coefficient(SpinQuantumNumber s, int two_m) {
  if (two_m < -s.two_s() || two_m > s.two_s() || (two_m + s.two_s()) % 2 != 0) {
    throw DomainError("ladder_coefficient: 2m=" + std::to_string(two_m) + " is not in {-2S, -2S+2, ..., 2S}");
  }
  const double m = 0.5 * two_m;
  return std::sqrt(s.casimir() - m * (m - 1.0));
}

inline SpinOperators spin_matrices(SpinQuantumNumber s) {
  const Index n = s.dim();
  SpinOperators ops{s, {}, {}, {}, {}, {}, {}};
  ops.s3 = DenseMatrix::Zero(n, n);
  ops.sp = DenseMatrix::Zero(n, n);
  for (Index k = 0; k < n; ++k) {
    const int two_m = s.two_s() - 2 * static_cast<int>(k);
    ops.s3(k, k) = 0.5 * two_m;
    if (k + 1 < n) ops.sp(k, k + 1) = ladder_coefficient(s, two_m);
  }
  ops.sm = ops.sp.adjoint();
  ops.s1 = (ops.sp + ops.sm) / 2.0;
  ops.s2 = (ops.sp - ops.sm) / Complex(0.0, 2.0);
  ops.identity = DenseMatrix::Identity(n, n);
  return ops;
}

/// Pauli matrix sigma^axis = 2 S^axis for spin 1/2.
inline DenseMatrix pauli(int axis) {
  return 2.0 * spin_matrices(kSpinHalf).component(axis);
}

/// sum_i S^i (x) S^i on two spin-S sites.
inline DenseMatrix spin_dot(SpinQuantumNumber s) {
  const SpinOperators ops = spin_matrices(s);
  DenseMatrix out = DenseMatrix::Zero(s.dim() * s.dim(), s.dim() * s.dim());
  for (int axis = 1; axis <= 3; ++axis)
    out += Eigen::kroneckerProduct(ops.component(axis), ops.component(axis)).eval();
  return out;
}

/// Spectral norm (largest singular value). Hermitian and anti-Hermitian
/// input (up to a relative 1e-14 entrywise defect) goes through eigenvalues.
inline double operator_norm(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw DimensionError("operator_norm: matrix is not square");
  if (a.size() == 0) return 0.0;
  const double scale = max_abs_entry(a);
  if (scale == 0.0) return 0.0;
  const DenseMatrix herm = 0.5 * (a + a.adjoint());
  const DenseMatrix skew = 0.5 * (a - a.adjoint());
  if (max_abs_entry(skew) <= 1e-14 * scale) return hermitian_eigen(herm, false).values.cwiseAbs().maxCoeff();
  if (max_abs_entry(herm) <= 1e-14 * scale) {
    return hermitian_eigen(DenseMatrix(kI * skew), false).values.cwiseAbs().maxCoeff();
  }
  const DenseMatrix gram = a.adjoint() * a;
  return std::sqrt(std::max(0.0, hermitian_eigen(gram, false).values.maxCoeff()));
}

inline double operator_norm(const Operator& a) {
  if (a.is_dense() || a.dim() <= default_caps().dense) return operator_norm(a.to_dense());
  // Largest eigenvalue of A^dagger A through the lowest of -A^dagger A.
  const SparseMatrix gram = -(SparseMatrix(a.sparse().adjoint()) * a.sparse());
  const KrylovResult r = lowest_eigenpairs(Operator(gram, true), 1);
  return std::sqrt(std::max(0.0, -r.values(0)));
}

}  // namespace qspin
