#pragma once

// Eigen-analysis: full spectra, ground spaces, gaps, correlations and the
// structure factor.

#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "qspin/errors.hpp"
#include "qspin/lanczos.hpp"
#include "qspin/lattice.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"
#include "qspin/spin_algebra.hpp"
#include "qspin/states.hpp"

namespace qspin {

struct EigenSolution {
  RealVector eigenvalues;  // ascending
  DenseMatrix eigenvectors;
  RealVector residuals;    // ||H v - lambda v|| per pair
};

struct GroundSpace {
  double energy = 0.0;
  int degeneracy = 0;
  DenseMatrix basis;  // orthonormal columns
  /// Lowest eigenvalue above the ground space, if one was resolved.
  std::optional<double> next_level;
  double norm = 0.0;  // ||H|| (exact in dense mode, row-sum bound in sparse mode)
  double max_residual = 0.0;
};

enum class SolverMode { automatic, dense, sparse };

struct SpectrumOptions {
  double degeneracy_tol = 1e-8;  // relative to max(1, ||H||)
  SolverMode mode = SolverMode::automatic;
  KrylovOptions krylov{};
};

namespace detail {

inline void require_hermitian(const Operator& h, const char* what) {
  if (h.hermitian_hint().value_or(false)) return;
  const double defect = h.hermiticity_defect();
  if (defect > tol::kExact * std::max(1.0, infinity_norm(h))) {
    throw DomainError(std::string(what) + ": operator is not Hermitian (defect " + std::to_string(defect) + ")");
  }
}

inline bool use_dense(const Operator& h, SolverMode mode) {
  switch (mode) {
    case SolverMode::dense: return true;
    case SolverMode::sparse: return false;
    default: return h.dim() <= default_caps().dense;
  }
}

}  // namespace detail

/// Complete eigendecomposition (dense mode only).
inline EigenSolution full_spectrum(const Operator& h) {
  detail::require_hermitian(h, "full_spectrum");
  if (h.dim() > default_caps().dense) {
    throw ResourceError("full_spectrum: dimension " + std::to_string(h.dim()) + " exceeds the dense cap");
  }
  const DenseMatrix m = h.to_dense();
  HermitianEigen eig = hermitian_eigen(m);
  EigenSolution out{std::move(eig.values), std::move(eig.vectors), {}};
  out.residuals.resize(out.eigenvalues.size());
  const DenseMatrix hv = m * out.eigenvectors;
  for (Index k = 0; k < out.eigenvalues.size(); ++k)
    out.residuals(k) = (hv.col(k) - out.eigenvalues(k) * out.eigenvectors.col(k)).norm();
  return out;
}

namespace detail {

inline GroundSpace ground_from_levels(const RealVector& values, const DenseMatrix& vectors, double norm,
                                      double degeneracy_tol, double max_residual) {
  GroundSpace g;
  g.energy = values(0);
  g.norm = norm;
  g.max_residual = max_residual;
  const double window = degeneracy_tol * std::max(1.0, norm);
  Index deg = 0;
  while (deg < values.size() && values(deg) - g.energy <= window) ++deg;
  g.degeneracy = static_cast<int>(deg);
  g.basis = vectors.leftCols(deg);
  if (deg < values.size()) g.next_level = values(deg);
  return g;
}

}  // namespace detail

/// Lowest eigenvalue, its multiplicity and an orthonormal eigenbasis.
/// Sparse mode grows the number of requested pairs until a level above the
/// ground space is resolved, so multiplets larger than the block are counted.
inline GroundSpace ground_space(const Operator& h, const SpectrumOptions& opt = {}) {
  detail::require_hermitian(h, "ground_space");
  if (detail::use_dense(h, opt.mode)) {
    const EigenSolution sol = full_spectrum(h);
    const double norm = std::max(std::abs(sol.eigenvalues(0)), std::abs(sol.eigenvalues(sol.eigenvalues.size() - 1)));
    return detail::ground_from_levels(sol.eigenvalues, sol.eigenvectors, norm, opt.degeneracy_tol,
                                      sol.residuals.maxCoeff());
  }
  int nev = opt.krylov.block_size + 1;
  while (true) {
    const KrylovResult r = lowest_eigenpairs(h, nev, opt.krylov);
    GroundSpace g = detail::ground_from_levels(r.values, r.vectors, r.norm_estimate, opt.degeneracy_tol,
                                               r.residuals.maxCoeff());
    if (g.next_level || nev >= h.dim()) return g;
    nev = static_cast<int>(std::min<Index>(h.dim(), 2 * nev));
  }
}

/// Distance from the ground energy to the next distinct level; 0 if none.
inline double spectral_gap(const GroundSpace& g) {
  return g.next_level ? std::max(0.0, *g.next_level - g.energy) : 0.0;
}

inline double spectral_gap(const Operator& h, const SpectrumOptions& opt = {}) {
  return spectral_gap(ground_space(h, opt));
}

enum class CorrelationKind { spin_dot, s3s3 };

namespace detail {

inline DenseMatrix correlation_op(const Volume& v, std::size_t x, std::size_t y, CorrelationKind kind) {
  const SpinQuantumNumber s = SpinQuantumNumber::from_local_dim(v.local_dim());
  const SpinOperators ops = spin_matrices(s);
  if (x == y) {
    if (kind == CorrelationKind::s3s3) return ops.s3 * ops.s3;
    return ops.s1 * ops.s1 + ops.s2 * ops.s2 + ops.s3 * ops.s3;
  }
  if (kind == CorrelationKind::s3s3) return Eigen::kroneckerProduct(ops.s3, ops.s3);
  return spin_dot(s);
}

inline Operator correlation_operator(const Volume& v, std::size_t x, std::size_t y, CorrelationKind kind) {
  if (x >= v.size() || y >= v.size()) throw DomainError("two_point: site outside the volume");
  const DenseMatrix local = correlation_op(v, x, y, kind);
  if (x == y) return embed(local, {x}, v);
  return embed(local, {x, y}, v);
}

}  // namespace detail

/// <S_x . S_y> or <S3_x S3_y> in the given state.
inline double two_point(const StateVector& psi, std::size_t x, std::size_t y, const Volume& v,
                        CorrelationKind kind) {
  return expectation(psi, detail::correlation_operator(v, x, y, kind)).real();
}

inline double two_point(const DensityMatrix& rho, std::size_t x, std::size_t y, const Volume& v,
                        CorrelationKind kind) {
  return expectation(rho, detail::correlation_operator(v, x, y, kind)).real();
}

/// Average over an orthonormal ground-space basis: Tr(P O) / dim P.
inline double two_point(const GroundSpace& g, std::size_t x, std::size_t y, const Volume& v, CorrelationKind kind) {
  const Operator o = detail::correlation_operator(v, x, y, kind);
  double total = 0.0;
  for (Index k = 0; k < g.basis.cols(); ++k) total += o.apply(Vector(g.basis.col(k))).dot(g.basis.col(k)).real();
  return total / static_cast<double>(g.basis.cols());
}

namespace detail {

/// Probability of each product-basis state.
inline RealVector basis_probabilities(const StateVector& psi) { return psi.amplitudes().cwiseAbs2(); }
inline RealVector basis_probabilities(const DensityMatrix& rho) { return rho.matrix().diagonal().real(); }
inline RealVector basis_probabilities(const GroundSpace& g) {
  RealVector p = RealVector::Zero(g.basis.rows());
  for (Index k = 0; k < g.basis.cols(); ++k) p += g.basis.col(k).cwiseAbs2();
  return p / static_cast<double>(g.basis.cols());
}

}  // namespace detail

/// (1/|V|^2) sum_{x,y} e^{i k.(x-y)} <S3_x S3_y>. Uses that S3 is diagonal in
/// the product basis.
template <typename State>
double structure_factor(const State& state, const Volume& v, const std::vector<double>& momentum) {
  if (momentum.size() != v.dimension()) throw DimensionError("structure_factor: momentum has wrong dimension");
  const RealVector p = detail::basis_probabilities(state);
  const auto hd = v.hilbert_dim();
  if (!hd || p.size() != *hd) throw DimensionError("structure_factor: state does not live on this volume");
  const Index n = v.local_dim();
  const double spin = 0.5 * static_cast<double>(n - 1);
  const std::vector<Index> strides = basis_strides(v);
  const std::size_t count = v.size();

  std::vector<double> phase_re(count), phase_im(count);
  for (std::size_t r = 0; r < count; ++r) {
    double arg = 0.0;
    for (std::size_t k = 0; k < momentum.size(); ++k) arg += momentum[k] * v.sites()[r].coords[k];
    phase_re[r] = std::cos(arg);
    phase_im[r] = std::sin(arg);
  }
  // sum_{x,y} e^{ik(x-y)} m_x m_y = |sum_x e^{ikx} m_x|^2 per basis state.
  double total = 0.0;
  for (Index idx = 0; idx < p.size(); ++idx) {
    if (p(idx) == 0.0) continue;
    double re = 0.0, im = 0.0;
    for (std::size_t r = 0; r < count; ++r) {
      const double m = spin - static_cast<double>(basis_digit(idx, r, strides, n));
      re += phase_re[r] * m;
      im += phase_im[r] * m;
    }
    total += p(idx) * (re * re + im * im);
  }
  return total / static_cast<double>(count * count);
}

}  // namespace qspin
