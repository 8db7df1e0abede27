#pragma once

// Heisenberg-picture evolution alpha_t(A) = e^{itH} A e^{-itH}, its
// imaginary-time continuation, and Lieb-Robinson commutator scans.

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qspin/errors.hpp"
#include "qspin/interactions.hpp"
#include "qspin/lattice.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"
#include "qspin/spin_algebra.hpp"

namespace qspin {

/// beta * ||H|| above this refuses imaginary-time evolution.
inline constexpr double kImaginaryRangeLimit = 700.0;

/// Eigendecomposition of a Hermitian H, reused for every time on a grid.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const Operator& h) {
    if (h.hermiticity_defect() > tol::kExact * std::max(1.0, max_abs_entry(h.to_dense()))) {
      throw DomainError("propagator: Hamiltonian is not Hermitian");
    }
    HermitianEigen eig = hermitian_eigen(h.to_dense());
    energies_ = std::move(eig.values);
    basis_ = std::move(eig.vectors);
  }

  const RealVector& energies() const { return energies_; }
  const DenseMatrix& basis() const { return basis_; }
  Index dim() const { return energies_.size(); }
  double norm() const {
    return energies_.size() == 0 ? 0.0 : std::max(std::abs(energies_(0)), std::abs(energies_(energies_.size() - 1)));
  }

  DenseMatrix to_eigenbasis(const DenseMatrix& a) const { return basis_.adjoint() * a * basis_; }
  DenseMatrix from_eigenbasis(const DenseMatrix& a) const { return basis_ * a * basis_.adjoint(); }

  /// Entrywise a_ij * exp(i (E_i - E_j) z) in the eigenbasis; z = t gives
  /// real-time evolution and z = i beta gives e^{-beta H} A e^{beta H}.
  DenseMatrix evolve_in_eigenbasis(const DenseMatrix& a, Complex z) const {
    check_dim(a);
    DenseMatrix out(a.rows(), a.cols());
    for (Index j = 0; j < a.cols(); ++j)
      for (Index i = 0; i < a.rows(); ++i)
        out(i, j) = a(i, j) * std::exp(kI * (energies_(i) - energies_(j)) * z);
    return out;
  }

  Operator evolve(const Operator& a, double t) const {
    if (t == 0.0) return a;
    return Operator(from_eigenbasis(evolve_in_eigenbasis(to_eigenbasis(a.to_dense()), Complex(t, 0.0))));
  }

  Operator evolve_imaginary(const Operator& a, double beta) const {
    check_range(beta);
    if (beta == 0.0) return a;
    DenseMatrix out = from_eigenbasis(evolve_in_eigenbasis(to_eigenbasis(a.to_dense()), Complex(0.0, beta)));
    if (!out.allFinite()) throw RangeError("evolve_imaginary: result overflowed");
    return Operator(std::move(out));
  }

  /// Schroedinger picture: e^{-itH} psi.
  Vector propagate(const Vector& psi, double t) const {
    if (psi.size() != dim()) throw DimensionError("propagate: vector length does not match");
    Vector c = basis_.adjoint() * psi;
    for (Index k = 0; k < c.size(); ++k) c(k) *= std::exp(-kI * energies_(k) * t);
    return basis_ * c;
  }

  void check_range(double beta) const {
    if (beta < 0.0) throw DomainError("imaginary time must be >= 0");
    if (beta * norm() > kImaginaryRangeLimit) {
      throw RangeError("beta * ||H|| = " + std::to_string(beta * norm()) + " exceeds the range limit " +
                       std::to_string(kImaginaryRangeLimit));
    }
  }

 private:
  void check_dim(const DenseMatrix& a) const {
    if (a.rows() != dim() || a.cols() != dim()) throw DimensionError("propagator: operator dimension mismatch");
  }

  RealVector energies_;
  DenseMatrix basis_;
};

/// e^{-itH} psi by short-iteration Lanczos, for operators too large to
/// diagonalize. Steps are sized so that ||H|| dt <= 2.
inline Vector krylov_propagate(const Operator& h, const Vector& psi, double t, int krylov_dim = 30) {
  if (psi.size() != h.dim()) throw DimensionError("krylov_propagate: vector length does not match");
  if (t == 0.0 || psi.norm() == 0.0) return psi;
  const double norm_bound = std::max(infinity_norm(h), 1e-300);
  const int steps = std::max(1, static_cast<int>(std::ceil(norm_bound * std::abs(t) / 2.0)));
  const double dt = t / steps;
  const Index m_max = std::min<Index>(krylov_dim, h.dim());
  Vector v = psi;
  for (int s = 0; s < steps; ++s) {
    const double beta0 = v.norm();
    DenseMatrix q(h.dim(), m_max);
    DenseMatrix tri = DenseMatrix::Zero(m_max, m_max);
    q.col(0) = v / beta0;
    Index m = m_max;
    for (Index k = 0; k < m_max; ++k) {
      Vector w = h.apply(Vector(q.col(k)));
      for (int pass = 0; pass < 2; ++pass) {
        const Vector c = q.leftCols(k + 1).adjoint() * w;
        w.noalias() -= q.leftCols(k + 1) * c;
        tri.col(k).head(k + 1) += c;
      }
      if (k + 1 == m_max) break;
      const double b = w.norm();
      if (b <= 1e-14 * norm_bound) {
        m = k + 1;
        break;
      }
      tri(k + 1, k) = b;
      q.col(k + 1) = w / b;
    }
    DenseMatrix small = tri.topLeftCorner(m, m);
    small = (0.5 * (small + small.adjoint())).eval();
    const HermitianEigen eig = hermitian_eigen(small);
    Vector coeff = eig.vectors.row(0).adjoint();
    for (Index k = 0; k < m; ++k) coeff(k) *= std::exp(-kI * eig.values(k) * dt);
    v = beta0 * (q.leftCols(m) * (eig.vectors * coeff));
  }
  return v;
}

/// alpha_t(A) = e^{itH} A e^{-itH}. Dense H uses its eigendecomposition;
/// sparse H propagates the columns of A with the Krylov route.
inline Operator evolve(const Operator& h, const Operator& a, double t) {
  if (h.dim() != a.dim()) throw DimensionError("evolve: dimension mismatch");
  if (t == 0.0) return a;
  if (h.is_dense()) return SpectralPropagator(h).evolve(a, t);
  if (h.hermiticity_defect() > tol::kExact * std::max(1.0, infinity_norm(h))) {
    throw DomainError("evolve: Hamiltonian is not Hermitian");
  }
  const DenseMatrix am = a.to_dense();
  DenseMatrix left(am.rows(), am.cols());
  for (Index j = 0; j < am.cols(); ++j) left.col(j) = krylov_propagate(h, Vector(am.col(j)), -t);
  const DenseMatrix left_adj = left.adjoint();
  DenseMatrix right(am.rows(), am.cols());
  for (Index j = 0; j < am.cols(); ++j) right.col(j) = krylov_propagate(h, Vector(left_adj.col(j)), -t);
  return Operator(DenseMatrix(right.adjoint()));
}

/// e^{-beta H} A e^{beta H} (dense mode).
inline Operator evolve_imaginary(const Operator& h, const Operator& a, double beta) {
  if (h.dim() != a.dim()) throw DimensionError("evolve_imaginary: dimension mismatch");
  return SpectralPropagator(h).evolve_imaginary(a, beta);
}

/// Norms ||[alpha_t(A_0), B_x]|| on a (time, distance) grid.
struct LRScan {
  std::vector<double> times;
  std::vector<int> distances;
  Eigen::MatrixXd norms;  // norms(time index, distance index)
  double a_norm = 0.0;
  double b_norm = 0.0;
  std::string model;
  std::string volume;
  std::string a_label;
  std::string b_label;
};

struct LRFit {
  double c = 0.0;  // decay constant
  double v = 0.0;  // velocity
  double max_violation = 0.0;
  std::size_t points_used = 0;
  std::string method =
      "least-squares fit of log-norm to log(2|A||B|) - c(|x| - v|t|) over entries above 1e-12, "
      "then the smallest velocity increase making the bound hold on every grid point";
};

inline constexpr double kLRNoiseFloor = 1e-12;

/// Scan on a chain: A sits on site 0, B is translated to site x.
inline LRScan lr_scan(const Interaction& phi, const Volume& chain, const DenseMatrix& a, const DenseMatrix& b,
                      const std::vector<double>& times, const std::vector<int>& distances) {
  if (!chain.is_chain()) throw UnsupportedError("lr_scan: needs a one-dimensional chain");
  if (a.rows() != chain.local_dim() || b.rows() != chain.local_dim()) {
    throw DimensionError("lr_scan: A and B must be single-site observables");
  }
  for (double t : times)
    if (t < 0.0) throw DomainError("lr_scan: only t >= 0 is scanned");
  for (int x : distances)
    if (x < 0 || static_cast<std::size_t>(x) >= chain.size()) throw DomainError("lr_scan: distance outside the chain");
  const auto hd = chain.hilbert_dim();
  if (!hd || *hd > default_caps().dense) throw ResourceError("lr_scan: grid too large for dense mode");

  const Operator h = assemble_hamiltonian(phi, chain, {Storage::dense, default_caps()});
  const SpectralPropagator prop(h);
  const Operator a0 = embed(a, {0}, chain, Storage::dense);
  const DenseMatrix a_tilde = prop.to_eigenbasis(a0.dense());

  LRScan scan;
  scan.times = times;
  scan.distances = distances;
  scan.volume = "chain L=" + std::to_string(chain.size()) + " " + to_string(chain.boundary());
  scan.a_norm = operator_norm(a);
  scan.b_norm = operator_norm(b);
  scan.norms.resize(static_cast<Index>(times.size()), static_cast<Index>(distances.size()));
  // B_x is single-site, so keep it sparse and multiply against dense A(t).
  std::vector<SparseMatrix> bx;
  for (int x : distances) bx.push_back(embed(b, {static_cast<std::size_t>(x)}, chain, Storage::sparse).sparse());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const DenseMatrix at = times[ti] == 0.0 ? a0.dense()
                                            : prop.from_eigenbasis(prop.evolve_in_eigenbasis(a_tilde, times[ti]));
    for (std::size_t xi = 0; xi < distances.size(); ++xi) {
      scan.norms(static_cast<Index>(ti), static_cast<Index>(xi)) = operator_norm(DenseMatrix(at * bx[xi] - bx[xi] * at));
    }
  }
  return scan;
}

inline LRFit lr_fit(const LRScan& scan) {
  const double log_c0 = std::log(2.0 * scan.a_norm * scan.b_norm);
  std::vector<double> xs, ts, ys;
  for (std::size_t ti = 0; ti < scan.times.size(); ++ti)
    for (std::size_t xi = 0; xi < scan.distances.size(); ++xi) {
      const double n = scan.norms(static_cast<Index>(ti), static_cast<Index>(xi));
      if (n > kLRNoiseFloor) {
        xs.push_back(std::abs(scan.distances[xi]));
        ts.push_back(std::abs(scan.times[ti]));
        ys.push_back(std::log(n) - log_c0);
      }
    }
  if (xs.size() < 3) {
    throw DegenerateInputError("lr_fit: fewer than 3 commutator norms above the noise floor " +
                               std::to_string(kLRNoiseFloor));
  }
  // y = -c x + (c v) t, no intercept.
  Eigen::MatrixXd design(static_cast<Index>(xs.size()), 2);
  Eigen::VectorXd rhs(static_cast<Index>(xs.size()));
  for (std::size_t k = 0; k < xs.size(); ++k) {
    design(static_cast<Index>(k), 0) = xs[k];
    design(static_cast<Index>(k), 1) = ts[k];
    rhs(static_cast<Index>(k)) = ys[k];
  }
  const Eigen::Vector2d coef = design.colPivHouseholderQr().solve(rhs);

  LRFit fit;
  fit.points_used = xs.size();
  fit.c = -coef(0);
  if (!(fit.c > 0.0)) fit.c = 1e-3;
  // Points at t = 0 can only be accommodated by lowering c.
  for (std::size_t ti = 0; ti < scan.times.size(); ++ti) {
    if (scan.times[ti] != 0.0) continue;
    for (std::size_t xi = 0; xi < scan.distances.size(); ++xi) {
      const double n = scan.norms(static_cast<Index>(ti), static_cast<Index>(xi));
      const double x = std::abs(scan.distances[xi]);
      if (n > 0.0 && x > 0.0) fit.c = std::min(fit.c, (log_c0 - std::log(n)) / x);
    }
  }
  fit.v = std::max(0.0, coef(1) / fit.c);
  for (std::size_t ti = 0; ti < scan.times.size(); ++ti) {
    const double t = std::abs(scan.times[ti]);
    if (t == 0.0) continue;
    for (std::size_t xi = 0; xi < scan.distances.size(); ++xi) {
      const double n = scan.norms(static_cast<Index>(ti), static_cast<Index>(xi));
      if (n <= 0.0) continue;
      const double needed = ((std::log(n) - log_c0) / fit.c + std::abs(scan.distances[xi])) / t;
      fit.v = std::max(fit.v, needed);
    }
  }
  for (std::size_t ti = 0; ti < scan.times.size(); ++ti)
    for (std::size_t xi = 0; xi < scan.distances.size(); ++xi) {
      const double bound = std::exp(log_c0 - fit.c * (std::abs(scan.distances[xi]) - fit.v * std::abs(scan.times[ti])));
      fit.max_violation =
          std::max(fit.max_violation, scan.norms(static_cast<Index>(ti), static_cast<Index>(xi)) - bound);
    }
  return fit;
}

}  // namespace qspin
