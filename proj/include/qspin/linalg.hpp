#pragma once

// Dense/sparse matrix types and the Hermitian eigensolver backend.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>
#include <lapacke.h>

#include "qspin/errors.hpp"

namespace qspin {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Tolerance tiers shared by the whole library.
namespace tol {
inline constexpr double kExact = 1e-12;
inline constexpr double kSolver = 1e-10;
}  // namespace tol

/// Dimension caps. Dense storage and dense algorithms are used up to
/// `dense`; nothing larger than `sparse` is ever assembled.
struct DimensionCaps {
  Index dense = 4096;
  Index sparse = 65536;
};

inline DimensionCaps& default_caps() {
  static DimensionCaps caps;
  return caps;
}

struct HermitianEigen {
  RealVector values;   // ascending
  DenseMatrix vectors; // columns; empty if values only were requested
};

/// Full eigendecomposition of a Hermitian matrix (LAPACK zheev). Only the
/// lower triangle is read. zheevd is avoided: the divide-and-conquer path
/// returns wrong eigenvectors above n ~ 300 with some LAPACK/OpenBLAS builds.
inline HermitianEigen hermitian_eigen(const DenseMatrix& h, bool with_vectors = true) {
  if (h.rows() != h.cols()) throw DimensionError("hermitian_eigen: matrix is not square");
  HermitianEigen out;
  const Index n = h.rows();
  out.values.resize(n);
  if (n == 0) return out;
  DenseMatrix work = h;
  const lapack_int info = LAPACKE_zheev(
      LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L', static_cast<lapack_int>(n),
      reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n),
      out.values.data());
  if (info != 0) {
    throw SolverError("zheev failed with info=" + std::to_string(info));
  }
  if (with_vectors) out.vectors = std::move(work);
  return out;
}

/// Largest |entry| of A - A^dagger.
inline double hermiticity_defect(const DenseMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j; i < a.rows(); ++i)
      worst = std::max(worst, std::abs(a(i, j) - std::conj(a(j, i))));
  return worst;
}

inline double hermiticity_defect(const SparseMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  const SparseMatrix diff = a - SparseMatrix(a.adjoint());
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  return worst;
}

inline double max_abs_entry(const DenseMatrix& a) {
  return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

}  // namespace qspin
