#pragma once

// States on a finite volume and the numerical equilibrium / ground-state
// criteria built on them.
//
// Convention: the finite-volume derivation is delta(A) = [H, A], with no
// factor i. With it, omega(A* delta(A)) = <A psi|(H - E0)|A psi> >= 0 in a
// ground state, and the energy-entropy balance inequality holds as written
// for Gibbs states.

#include <cmath>
#include <string>

#include "qspin/dynamics.hpp"
#include "qspin/errors.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"

namespace qspin {

/// Unit vector representing a pure state.
class StateVector {
 public:
  explicit StateVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
    if (std::abs(amps_.norm() - 1.0) > tol::kExact) {
      throw DomainError("state vector must have unit norm (norm " + std::to_string(amps_.norm()) + ")");
    }
  }

  /// Rescales a nonzero vector to unit norm.
  static StateVector normalized(const Vector& v) {
    const double n = v.norm();
    if (n == 0.0) throw DomainError("cannot normalize the zero vector");
    return StateVector(v / n);
  }

  /// Product-basis vector |index>.
  static StateVector basis(Index dim, Index index) {
    Vector v = Vector::Zero(dim);
    v(index) = 1.0;
    return StateVector(std::move(v));
  }

  const Vector& amplitudes() const { return amps_; }
  Index dim() const { return amps_.size(); }

 private:
  Vector amps_;
};

/// Positive semidefinite, unit-trace matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(DenseMatrix rho) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols()) throw DimensionError("density matrix must be square");
    if (hermiticity_defect(rho_) > tol::kExact) throw DomainError("density matrix must be Hermitian");
    trace_ = rho_.trace().real();
    if (std::abs(trace_ - 1.0) > tol::kExact) {
      throw DomainError("density matrix must have unit trace (trace " + std::to_string(trace_) + ")");
    }
    if (rho_.rows() > 0 && hermitian_eigen(rho_, false).values(0) < -tol::kExact) {
      throw DomainError("density matrix must be positive semidefinite");
    }
  }

  static DensityMatrix maximally_mixed(Index dim) {
    return DensityMatrix(DenseMatrix::Identity(dim, dim) / static_cast<double>(dim));
  }

  static DensityMatrix pure(const StateVector& psi) {
    const Vector& v = psi.amplitudes();
    DenseMatrix rho = v * v.adjoint();
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
  }

  /// Uniform mixture of orthonormal columns (e.g. a ground-space projector / dim).
  static DensityMatrix mixture(const DenseMatrix& orthonormal_columns) {
    if (orthonormal_columns.cols() == 0) throw DomainError("mixture needs at least one vector");
    DenseMatrix rho = orthonormal_columns * orthonormal_columns.adjoint() /
                      static_cast<double>(orthonormal_columns.cols());
    return DensityMatrix(0.5 * (rho + rho.adjoint()));
  }

  const DenseMatrix& matrix() const { return rho_; }
  double trace() const { return trace_; }
  Index dim() const { return rho_.rows(); }

 private:
  DenseMatrix rho_;
  double trace_ = 1.0;
};

/// omega(A) = <psi|A|psi>.
inline Complex expectation(const StateVector& psi, const Operator& a) {
  if (a.dim() != psi.dim()) throw DimensionError("expectation: dimension mismatch");
  return psi.amplitudes().dot(a.apply(psi.amplitudes()));
}

/// omega(A) = Tr(rho A).
inline Complex expectation(const DensityMatrix& rho, const Operator& a) {
  if (a.dim() != rho.dim()) throw DimensionError("expectation: dimension mismatch");
  const DenseMatrix& r = rho.matrix();
  Complex total{0.0, 0.0};
  if (a.is_dense()) {
    // Tr(rho A) = sum_ij rho_ij A_ji
    total = (r.transpose().cwiseProduct(a.dense())).sum();
  } else {
    const SparseMatrix& s = a.sparse();
    for (Index i = 0; i < s.outerSize(); ++i)
      for (SparseMatrix::InnerIterator it(s, i); it; ++it) total += r(it.col(), it.row()) * it.value();
  }
  return total;
}

struct GibbsState {
  DensityMatrix rho;
  double partition_function;      // may be +inf for large beta * |E0|
  double log_partition_function;  // always finite
};

/// rho_beta = e^{-beta H} / Z, built from the eigendecomposition with the
/// ground energy shifted out of the exponent.
inline GibbsState gibbs(const Operator& h, double beta) {
  if (beta < 0.0) throw DomainError("gibbs: beta must be >= 0");
  if (h.dim() > default_caps().dense) throw ResourceError("gibbs: dimension exceeds the dense cap");
  if (h.hermiticity_defect() > tol::kExact * std::max(1.0, max_abs_entry(h.to_dense()))) {
    throw DomainError("gibbs: Hamiltonian is not Hermitian");
  }
  const HermitianEigen eig = hermitian_eigen(h.to_dense());
  const double e0 = eig.values(0);
  RealVector weights(eig.values.size());
  for (Index k = 0; k < weights.size(); ++k) weights(k) = std::exp(-beta * (eig.values(k) - e0));
  const double shifted_z = weights.sum();
  const RealVector p = weights / shifted_z;
  DenseMatrix rho = eig.vectors * p.asDiagonal() * eig.vectors.adjoint();
  rho = (0.5 * (rho + rho.adjoint())).eval();
  // Renormalize the trace lost to rounding in the basis change.
  rho /= rho.trace().real();
  const double log_z = std::log(shifted_z) - beta * e0;
  return GibbsState{DensityMatrix(std::move(rho)), std::exp(log_z), log_z};
}

/// |omega_beta(A alpha_{i beta}(B)) - omega_beta(BA)| for the Gibbs state of H.
/// Both sides are evaluated in the eigenbasis of H, where rho is diagonal, so
/// large factors e^{beta (E_i - E_j)} never meet small populations in a
/// cancelling sum.
inline double kms_residual(const Operator& h, double beta, const Operator& a, const Operator& b) {
  if (beta < 0.0) throw DomainError("kms_residual: beta must be >= 0");
  if (a.dim() != h.dim() || b.dim() != h.dim()) throw DimensionError("kms_residual: dimension mismatch");
  if (h.dim() > default_caps().dense) throw ResourceError("kms_residual: dimension exceeds the dense cap");
  const SpectralPropagator prop(h);
  prop.check_range(beta);
  const RealVector& e = prop.energies();
  RealVector p(e.size());
  for (Index k = 0; k < p.size(); ++k) p(k) = std::exp(-beta * (e(k) - e(0)));
  p /= p.sum();

  const DenseMatrix at = prop.to_eigenbasis(a.to_dense());
  const DenseMatrix bt = prop.to_eigenbasis(b.to_dense());
  const DenseMatrix bt_imag = prop.evolve_in_eigenbasis(bt, Complex(0.0, beta));
  if (!bt_imag.allFinite()) throw RangeError("kms_residual: imaginary-time evolution overflowed");

  // omega(X) = sum_i p_i X_ii in the eigenbasis.
  Complex lhs{0.0, 0.0}, rhs{0.0, 0.0};
  for (Index i = 0; i < p.size(); ++i) {
    Complex row_lhs{0.0, 0.0}, row_rhs{0.0, 0.0};
    for (Index j = 0; j < p.size(); ++j) {
      row_lhs += at(i, j) * bt_imag(j, i);
      row_rhs += bt(i, j) * at(j, i);
    }
    lhs += p(i) * row_lhs;
    rhs += p(i) * row_rhs;
  }
  return std::abs(lhs - rhs);
}

struct EebOptions {
  /// Accept omega(X*X) below 1e-14 and use 0 log(0/y) = 0.
  bool allow_vanishing = false;
};

inline constexpr double kEebDegenerateThreshold = 1e-14;

/// beta omega(X* [H, X]) - omega(X*X) log(omega(X*X) / omega(XX*)).
inline double eeb_deficit(const Operator& h, double beta, const Operator& x, const DensityMatrix& state,
                          const EebOptions& opt = {}) {
  if (x.dim() != h.dim() || state.dim() != h.dim()) throw DimensionError("eeb_deficit: dimension mismatch");
  const DenseMatrix hm = h.to_dense();
  const DenseMatrix xm = x.to_dense();
  const DenseMatrix xa = xm.adjoint();
  const DenseMatrix& rho = state.matrix();
  auto omega = [&](const DenseMatrix& m) { return (rho.transpose().cwiseProduct(m)).sum(); };

  const double lhs = beta * omega(xa * (hm * xm - xm * hm)).real();
  const double xx = omega(xa * xm).real();
  const double xx_rev = omega(xm * xa).real();
  if (xx < kEebDegenerateThreshold) {
    if (!opt.allow_vanishing) {
      throw DegenerateInputError("eeb_deficit: omega(X*X) = " + std::to_string(xx) + " is below 1e-14");
    }
    return lhs;
  }
  if (xx_rev < kEebDegenerateThreshold) {
    throw DegenerateInputError("eeb_deficit: omega(XX*) = " + std::to_string(xx_rev) + " is below 1e-14");
  }
  return lhs - xx * std::log(xx / xx_rev);
}

/// Re <psi| A* [H, A] |psi>. Non-negative for every A iff psi is a ground state.
inline double stability_value(const Operator& h, const StateVector& psi, const Operator& a) {
  if (a.dim() != h.dim() || psi.dim() != h.dim()) throw DimensionError("stability_value: dimension mismatch");
  const Vector& v = psi.amplitudes();
  const Vector av = a.apply(v);
  const Vector hav = h.apply(av);
  const Vector ahv = a.apply(h.apply(v));
  return (av.dot(hav) - av.dot(ahv)).real();
}

/// Tr(rho A* [H, A]).
inline double stability_value(const Operator& h, const DensityMatrix& rho, const Operator& a) {
  if (a.dim() != h.dim() || rho.dim() != h.dim()) throw DimensionError("stability_value: dimension mismatch");
  const DenseMatrix hm = h.to_dense();
  const DenseMatrix am = a.to_dense();
  const DenseMatrix m = am.adjoint() * (hm * am - am * hm);
  return (rho.matrix().transpose().cwiseProduct(m)).sum().real();
}

}  // namespace qspin
