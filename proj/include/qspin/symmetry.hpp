#pragma once

// Symmetry generators (total spin, the SU_q(2) twisted generators, site
// permutations) and residual-norm certificates of invariance.

#include <cmath>
#include <string>
#include <vector>

#include "qspin/errors.hpp"
#include "qspin/lattice.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"
#include "qspin/spin_algebra.hpp"
#include "qspin/states.hpp"

namespace qspin {

enum class GeneratorKind { lie_algebra, quantum_group, unitary_group_element };

struct GeneratorSet {
  std::string name;
  GeneratorKind kind = GeneratorKind::lie_algebra;
  std::vector<Operator> operators;
};

/// S^i = sum_x S^i_x for i = 1, 2, 3.
inline GeneratorSet total_spin(const Volume& v) {
  const SpinOperators ops = spin_matrices(SpinQuantumNumber::from_local_dim(v.local_dim()));
  GeneratorSet g{"total_spin", GeneratorKind::lie_algebra, {}};
  for (int axis = 1; axis <= 3; ++axis) {
    Operator sum = Operator::zero(*v.hilbert_dim(), Storage::sparse);
    for (std::size_t r = 0; r < v.size(); ++r) sum = sum + embed(ops.component(axis), {r}, v, Storage::sparse);
    g.operators.push_back(sum.as(*v.hilbert_dim() <= default_caps().dense ? Storage::dense : Storage::sparse));
  }
  return g;
}

/// Total S^3, S^+ and S^- (the ladder form of total_spin).
inline GeneratorSet total_spin_ladder(const Volume& v) {
  const SpinOperators ops = spin_matrices(SpinQuantumNumber::from_local_dim(v.local_dim()));
  GeneratorSet g{"total_spin_ladder", GeneratorKind::lie_algebra, {}};
  for (const DenseMatrix* local : {&ops.s3, &ops.sp, &ops.sm}) {
    Operator sum = Operator::zero(*v.hilbert_dim(), Storage::sparse);
    for (std::size_t r = 0; r < v.size(); ++r) sum = sum + embed(*local, {r}, v, Storage::sparse);
    g.operators.push_back(sum.as(*v.hilbert_dim() <= default_caps().dense ? Storage::dense : Storage::sparse));
  }
  return g;
}

/// The twist t = diag(1/q, q).
inline DenseMatrix suq2_twist(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("suq2: q must lie in (0, 1]");
  DenseMatrix t = DenseMatrix::Zero(2, 2);
  t(0, 0) = 1.0 / q;
  t(1, 1) = q;
  return t;
}

namespace detail {

/// Kronecker product of per-site factors in rank order.
inline Operator kron_chain(const std::vector<DenseMatrix>& factors) {
  SparseMatrix out(1, 1);
  out.insert(0, 0) = 1.0;
  for (const DenseMatrix& f : factors) {
    const SparseMatrix sf = f.sparseView(0.0, 0.0);
    out = SparseMatrix(Eigen::kroneckerProduct(out, sf));
  }
  return Operator(std::move(out));
}

}  // namespace detail

/// Generators of the SU_q(2) representation on an open spin-1/2 chain:
///   S3 = sum_x 1 (x) ... (x) S3_x (x) ... (x) 1
///   S+ = sum_x t (x) ... (x) t (x) S+_x (x) 1 (x) ... (x) 1
///   S- = sum_x 1 (x) ... (x) 1 (x) S-_x (x) t^-1 (x) ... (x) t^-1
inline GeneratorSet suq2_generators(int length, double q) {
  if (length < 2) throw DomainError("suq2: L must be >= 2");
  const DenseMatrix t = suq2_twist(q);
  const DenseMatrix t_inv = t.inverse();
  const SpinOperators ops = spin_matrices(kSpinHalf);
  const Index dim = Index{1} << length;
  GeneratorSet g{"suq2", GeneratorKind::quantum_group, {}};
  Operator s3 = Operator::zero(dim, Storage::sparse);
  Operator sp = Operator::zero(dim, Storage::sparse);
  Operator sm = Operator::zero(dim, Storage::sparse);
  for (int x = 0; x < length; ++x) {
    std::vector<DenseMatrix> f3(length, ops.identity), fp(length, ops.identity), fm(length, ops.identity);
    f3[x] = ops.s3;
    fp[x] = ops.sp;
    fm[x] = ops.sm;
    for (int y = 0; y < x; ++y) fp[y] = t;
    for (int y = x + 1; y < length; ++y) fm[y] = t_inv;
    s3 = s3 + detail::kron_chain(f3);
    sp = sp + detail::kron_chain(fp);
    sm = sm + detail::kron_chain(fm);
  }
  const Storage storage = dim <= default_caps().dense ? Storage::dense : Storage::sparse;
  g.operators = {s3.as(storage), sp.as(storage), sm.as(storage)};
  return g;
}

/// Single-element unitary generator set.
inline GeneratorSet unitary_generator(std::string name, Operator u) {
  return GeneratorSet{std::move(name), GeneratorKind::unitary_group_element, {std::move(u)}};
}

/// Spectral norm of the commutator, or of U*HU - H for unitary elements.
inline double invariance_residual(const Operator& h, const GeneratorSet& gens) {
  double worst = 0.0;
  for (const Operator& g : gens.operators) {
    if (g.dim() != h.dim()) throw DimensionError("invariance_residual: dimension mismatch");
    const Operator diff = gens.kind == GeneratorKind::unitary_group_element ? g.adjoint() * h * g - h
                                                                             : commutator(h, g);
    worst = std::max(worst, operator_norm(diff));
  }
  return worst;
}

namespace detail {

/// The state omega(U* . U), so that its expectation of P is omega(U* P U).
inline StateVector rotated(const StateVector& psi, const Operator& u) { return StateVector(u.apply(psi.amplitudes())); }

inline DensityMatrix rotated(const DensityMatrix& rho, const Operator& u) {
  const DenseMatrix ud = u.to_dense();
  const DenseMatrix r = ud * rho.matrix() * ud.adjoint();
  return DensityMatrix(0.5 * (r + r.adjoint()));
}

}  // namespace detail

/// max over probes P of |omega(U* P U) - omega(P)|.
template <typename State>
double state_invariance_residual(const State& state, const Operator& u, const std::vector<Operator>& probes) {
  if (u.dim() != state.dim()) throw DimensionError("state_invariance_residual: dimension mismatch");
  const Operator defect = u.adjoint() * u - Operator::identity(u.dim(), u.storage());
  if (defect.max_abs_difference(Operator::zero(u.dim(), u.storage())) > tol::kExact) {
    throw DomainError("state_invariance_residual: U is not unitary");
  }
  const State moved = detail::rotated(state, u);
  double worst = 0.0;
  for (const Operator& p : probes) worst = std::max(worst, std::abs(expectation(moved, p) - expectation(state, p)));
  return worst;
}

/// All single-site spin components plus every nearest-neighbor S.S bond.
inline std::vector<Operator> default_probes(const Volume& v) {
  const SpinQuantumNumber s = SpinQuantumNumber::from_local_dim(v.local_dim());
  const SpinOperators ops = spin_matrices(s);
  std::vector<Operator> probes;
  for (std::size_t r = 0; r < v.size(); ++r)
    for (int axis = 1; axis <= 3; ++axis) probes.push_back(embed(ops.component(axis), {r}, v));
  const DenseMatrix dot = spin_dot(s);
  for (const auto& [a, b] : v.edges()) probes.push_back(embed(dot, {a, b}, v));
  return probes;
}

/// Product of single-site rotations exp(-i angle S^axis).
inline Operator global_rotation(const Volume& v, int axis, double angle) {
  const SpinOperators ops = spin_matrices(SpinQuantumNumber::from_local_dim(v.local_dim()));
  const HermitianEigen eig = hermitian_eigen(ops.component(axis));
  Vector phases(eig.values.size());
  for (Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(-kI * angle * eig.values(k));
  const DenseMatrix local = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  Operator u = detail::kron_chain(std::vector<DenseMatrix>(v.size(), local));
  return u.as(u.dim() <= default_caps().dense ? Storage::dense : Storage::sparse);
}

/// Global spin flip: product of 2 S^1_x (spin 1/2 only, where it is unitary).
inline Operator spin_flip(const Volume& v) {
  if (v.local_dim() != 2) throw UnsupportedError("spin_flip: product of 2 S^1 is unitary for spin 1/2 only");
  Operator u = detail::kron_chain(std::vector<DenseMatrix>(v.size(), pauli(1)));
  return u.as(u.dim() <= default_caps().dense ? Storage::dense : Storage::sparse);
}

}  // namespace qspin
