#pragma once

// Block Krylov eigensolver for the low end of a Hermitian spectrum.
//
// Each cycle grows an orthonormal basis from a start block by applying H to
// every basis vector in turn and orthogonalizing the image against the whole
// basis twice (full reorthogonalization). The projected matrix is diagonalized
// and the cycle restarts from the lowest Ritz vectors plus a new block. Once
// the wanted pairs converge, one extra cycle is run from a fresh random block;
// this exposes copies of degenerate eigenvalues that a single start block
// cannot reach, and the result is accepted only if that cycle changes nothing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "qspin/errors.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"

namespace qspin {

struct KrylovOptions {
  int block_size = 4;
  int max_basis = 0;  // 0: chosen from nev and block size
  int max_restarts = 400;
  double tolerance = 1e-11;  // residual bound relative to the norm estimate
  std::uint64_t seed = 0x5eed1234abcdULL;
};

struct KrylovResult {
  RealVector values;    // ascending
  DenseMatrix vectors;  // columns, orthonormal
  RealVector residuals; // ||H v - lambda v||
  double norm_estimate = 0.0;
  int restarts = 0;
  long matvecs = 0;
};

/// Max absolute row sum; an upper bound on the spectral norm.
inline double infinity_norm(const Operator& h) {
  if (h.is_dense()) return h.dim() == 0 ? 0.0 : h.dense().cwiseAbs().rowwise().sum().maxCoeff();
  double worst = 0.0;
  const SparseMatrix& s = h.sparse();
  for (Index k = 0; k < s.outerSize(); ++k) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) row += std::abs(it.value());
    worst = std::max(worst, row);
  }
  return worst;
}

namespace detail {

inline DenseMatrix random_block(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix block(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      block(i, j) = Complex(re, im);
    }
  return block;
}

/// Orthogonalizes `v` against the first `count` columns of `basis` (two
/// passes). Returns the accumulated projection coefficients.
inline Vector orthogonalize(const DenseMatrix& basis, Index count, Vector& v) {
  Vector coeffs = Vector::Zero(count);
  if (count == 0) return coeffs;
  for (int pass = 0; pass < 2; ++pass) {
    const Vector c = basis.leftCols(count).adjoint() * v;
    v.noalias() -= basis.leftCols(count) * c;
    coeffs += c;
  }
  return coeffs;
}

}  // namespace detail

/// Lowest `nev` eigenpairs of a Hermitian operator.
inline KrylovResult lowest_eigenpairs(const Operator& h, int nev, const KrylovOptions& opt = {}) {
  const Index n = h.dim();
  if (nev < 1) throw DomainError("lowest_eigenpairs: nev must be positive");
  nev = static_cast<int>(std::min<Index>(nev, n));
  const int block = std::max(1, opt.block_size);
  const Index max_basis = std::min<Index>(
      n, opt.max_basis > 0 ? opt.max_basis : std::max<Index>(60, 2 * (nev + block) + 2 * block));

  KrylovResult out;
  out.norm_estimate = infinity_norm(h);
  const double scale = std::max(out.norm_estimate, 1e-300);
  const double target = opt.tolerance * std::max(out.norm_estimate, 1.0);

  // The Krylov space would be the whole space: diagonalize directly.
  if (max_basis >= n) {
    const HermitianEigen eig = hermitian_eigen(h.to_dense(n));
    out.values = eig.values.head(nev);
    out.vectors = eig.vectors.leftCols(nev);
    out.residuals.resize(nev);
    for (int k = 0; k < nev; ++k)
      out.residuals(k) = (h.apply(Vector(out.vectors.col(k))) - out.values(k) * out.vectors.col(k)).norm();
    return out;
  }

  std::mt19937_64 rng(opt.seed);
  DenseMatrix kept(n, 0);
  DenseMatrix expansion = detail::random_block(n, block, rng);
  bool verifying = false;
  RealVector previous;
  double last_residual = std::numeric_limits<double>::infinity();

  for (int cycle = 0; cycle <= opt.max_restarts; ++cycle) {
    out.restarts = cycle;
    DenseMatrix basis(n, max_basis);
    Index cols = 0;
    auto push = [&](Vector v) {
      if (cols >= max_basis) return;
      const double before = v.norm();
      if (before == 0.0) return;
      detail::orthogonalize(basis, cols, v);
      const double norm = v.norm();
      if (norm > 1e-8 * before) basis.col(cols++) = v / norm;
    };
    for (Index k = 0; k < kept.cols(); ++k) push(kept.col(k));
    for (Index k = 0; k < expansion.cols(); ++k) push(expansion.col(k));
    if (cols == 0) {
      expansion = detail::random_block(n, block, rng);
      continue;
    }

    DenseMatrix projected = DenseMatrix::Zero(max_basis, max_basis);
    Index processed = 0;
    while (processed < cols) {
      Vector w = h.apply(Vector(basis.col(processed)));
      ++out.matvecs;
      const Vector c = detail::orthogonalize(basis, cols, w);
      projected.col(processed).head(cols) = c;
      if (cols < max_basis) {
        const double norm = w.norm();
        if (norm > 1e-12 * scale) {
          basis.col(cols) = w / norm;
          projected(cols, processed) = norm;
          ++cols;
        }
      }
      ++processed;
    }

    DenseMatrix t = projected.topLeftCorner(cols, cols);
    t = (0.5 * (t + t.adjoint())).eval();
    const HermitianEigen ritz = hermitian_eigen(t);
    const Index keep = std::min<Index>(cols, std::max<Index>(nev + block, nev));
    DenseMatrix ritz_vectors = basis.leftCols(cols) * ritz.vectors.leftCols(keep);

    RealVector residuals(nev);
    DenseMatrix residual_vectors(n, nev);
    for (int k = 0; k < nev; ++k) {
      Vector r = h.apply(Vector(ritz_vectors.col(k))) - ritz.values(k) * ritz_vectors.col(k);
      ++out.matvecs;
      residuals(k) = r.norm();
      residual_vectors.col(k) = r;
    }
    last_residual = residuals.maxCoeff();
    const bool converged = last_residual <= target;

    if (converged) {
      const RealVector current = ritz.values.head(nev);
      if (verifying && previous.size() == nev &&
          (current - previous).cwiseAbs().maxCoeff() <= 10.0 * target) {
        out.values = current;
        out.vectors = ritz_vectors.leftCols(nev);
        out.residuals = residuals;
        return out;
      }
      verifying = true;
      previous = current;
      kept = ritz_vectors;
      expansion = detail::random_block(n, block, rng);
      continue;
    }

    verifying = false;
    kept = ritz_vectors;
    std::vector<Index> unconverged;
    for (int k = 0; k < nev; ++k)
      if (residuals(k) > target) unconverged.push_back(k);
    expansion.resize(n, static_cast<Index>(std::min<std::size_t>(unconverged.size(), block)));
    for (Index k = 0; k < expansion.cols(); ++k) expansion.col(k) = residual_vectors.col(unconverged[k]);
    if (expansion.cols() < block) {
      DenseMatrix extra = detail::random_block(n, block - expansion.cols(), rng);
      DenseMatrix joined(n, block);
      joined << expansion, extra;
      expansion = std::move(joined);
    }
  }
  throw SolverError("block Krylov solver did not converge within " + std::to_string(opt.max_restarts) +
                        " restarts (residual " + std::to_string(last_residual) + ")",
                    last_residual);
}

}  // namespace qspin
