#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qspin/qspin.hpp"

using namespace qspin;

namespace {

Eigen::VectorXd spectrum(const Operator& h) { return oracle::eigenvalues(h.to_dense()); }

void expect_spectrum(const Operator& h, const std::vector<double>& expected, double tol) {
  const Eigen::VectorXd ev = spectrum(h);
  ASSERT_EQ(ev.size(), static_cast<Eigen::Index>(expected.size()));
  for (std::size_t k = 0; k < expected.size(); ++k) EXPECT_NEAR(ev(static_cast<Eigen::Index>(k)), expected[k], tol);
}

}  // namespace

TEST(Heisenberg, TwoSiteSpectrum) {
  const Volume v = build_volume({2}, Boundary::open, 2);
  expect_spectrum(assemble_hamiltonian(heisenberg(1.0, kSpinHalf), v), {-0.25, -0.25, -0.25, 0.75}, 1e-14);
  expect_spectrum(assemble_hamiltonian(heisenberg(-1.0, kSpinHalf), v), {-0.75, 0.25, 0.25, 0.25}, 1e-14);
  EXPECT_THROW(heisenberg(0.0, kSpinHalf), DomainError);
}

TEST(Heisenberg, TermsVanishOffBonds) {
  const Volume v = build_volume({4}, Boundary::open, 2);
  const Interaction phi = heisenberg(1.0, kSpinHalf);
  EXPECT_EQ(phi.term({0}, v).size(), 0);
  EXPECT_EQ(phi.term({0, 2}, v).size(), 0);
  EXPECT_EQ(phi.term({1, 2}, v).size(), 16);
  EXPECT_DOUBLE_EQ(phi.range(), 1.0);
}

TEST(Heisenberg, MatchesKroneckerOracleOnRing) {
  for (int two_s : {1, 2}) {
    const int length = two_s == 1 ? 6 : 4;
    const Volume v = build_volume({length}, Boundary::periodic, two_s + 1);
    const Operator h = assemble_hamiltonian(heisenberg(-0.7, SpinQuantumNumber(two_s)), v);
    const oracle::Matrix ref = oracle::heisenberg_chain(length, true, 0.7, two_s == 2);
    EXPECT_LT((h.to_dense() - ref).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(Heisenberg, PeriodicFourSiteAntiferromagnet) {
  const Volume v = build_volume({4}, Boundary::periodic, 2);
  EXPECT_NEAR(spectrum(assemble_hamiltonian(heisenberg(-1.0, kSpinHalf), v))(0), -2.0, 1e-12);
}

TEST(Assembly, EmptyInteractionIsZero) {
  const Volume v = build_volume({3}, Boundary::open, 2);
  const Operator h = assemble_hamiltonian(Interaction(2), v);
  EXPECT_EQ(h.to_dense(), DenseMatrix::Zero(8, 8));
}

TEST(Assembly, ExactlyHermitianForAllModels) {
  const Volume chain = build_volume({5}, Boundary::periodic, 2);
  const Volume square = build_volume({2, 3}, Boundary::open, 2);
  const Volume spin1 = build_volume({4}, Boundary::periodic, 3);
  for (const auto& [phi, v] : {std::pair{heisenberg(0.4, kSpinHalf) + zeeman(0.3, kSpinHalf), &chain},
                               std::pair{xy_field(0.9), &square}, std::pair{ising(1.3, -0.2), &chain},
                               std::pair{aklt(), &spin1}}) {
    const Operator h = assemble_hamiltonian(phi, *v);
    EXPECT_EQ(h.hermiticity_defect(), 0.0);
    EXPECT_EQ(h.hermitian_hint(), std::optional<bool>(true));
  }
  EXPECT_EQ(xxz_suq2_chain(6, 0.37).hermiticity_defect(), 0.0);
}

TEST(Assembly, StorageAndCaps) {
  const Volume v = build_volume({6}, Boundary::open, 2);
  const Interaction phi = heisenberg(1.0, kSpinHalf);
  const Operator d = assemble_hamiltonian(phi, v, {Storage::dense, default_caps()});
  const Operator s = assemble_hamiltonian(phi, v, {Storage::sparse, default_caps()});
  EXPECT_TRUE(d.is_dense());
  EXPECT_FALSE(s.is_dense());
  EXPECT_EQ(d.max_abs_difference(s), 0.0);
  EXPECT_THROW(assemble_hamiltonian(phi, v, {Storage::dense, DimensionCaps{32, 1024}}), ResourceError);
  EXPECT_THROW(assemble_hamiltonian(phi, v, {std::nullopt, DimensionCaps{32, 32}}), ResourceError);
  EXPECT_THROW(assemble_hamiltonian(aklt(), v), DimensionError);
}

TEST(Assembly, TranslationCovarianceOnTorus) {
  const Volume v = build_volume({4}, Boundary::periodic, 3);
  const Operator u = permutation_unitary(translation(v, 0), v);
  for (const Interaction& phi : {heisenberg(-1.0, kSpinOne), aklt(), heisenberg(2.0, kSpinOne) + zeeman(0.5, kSpinOne)}) {
    const Operator h = assemble_hamiltonian(phi, v);
    EXPECT_LT((u.adjoint() * h * u).max_abs_difference(h), 1e-14);
  }
}

TEST(XyField, Examples) {
  const Volume v = build_volume({4}, Boundary::open, 2);
  const Operator h0 = assemble_hamiltonian(xy_field(0.0), v);
  EXPECT_LT(operator_norm(commutator(h0, total_spin(v).operators[2])), 1e-12);
  // Strong field: the all-up product state |0000> is the ground state.
  const HermitianEigen eig = hermitian_eigen(assemble_hamiltonian(xy_field(100.0), v).to_dense());
  EXPECT_NEAR(std::abs(eig.vectors(0, 0)), 1.0, 1e-12);
  const DenseMatrix site = *xy_field(1.0).onsite();
  const Eigen::VectorXd ev = oracle::eigenvalues(site);
  EXPECT_DOUBLE_EQ(ev(0), -0.5);
  EXPECT_DOUBLE_EQ(ev(1), 0.5);
}

TEST(Ising, Examples) {
  const Volume two = build_volume({2}, Boundary::open, 2);
  expect_spectrum(assemble_hamiltonian(ising(1.0, 0.0), two), {-0.25, -0.25, 0.25, 0.25}, 0.0);
  const Volume three = build_volume({3}, Boundary::open, 2);
  const DenseMatrix h = assemble_hamiltonian(ising(1.0, 0.0), three).to_dense();
  EXPECT_DOUBLE_EQ(h.diagonal().real().minCoeff(), -0.5);
  const DenseMatrix hf = assemble_hamiltonian(ising(0.7, -1.9), build_volume({2, 2}, Boundary::periodic, 2)).to_dense();
  DenseMatrix off = hf;
  off.diagonal().setZero();
  EXPECT_EQ(off.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Aklt, ProjectorProperties) {
  const DenseMatrix p = aklt_projector();
  EXPECT_LT((p * p - p).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_NEAR(p.trace().real(), 5.0, 1e-14);
  const Eigen::VectorXd ev = oracle::eigenvalues(p);
  for (Eigen::Index k = 0; k < ev.size(); ++k) EXPECT_NEAR(ev(k), k < 4 ? 0.0 : 1.0, 1e-14);
  const Operator h = assemble_hamiltonian(aklt(), build_volume({2}, Boundary::open, 3));
  const Eigen::VectorXd hv = spectrum(h);
  int kernel = 0;
  for (Eigen::Index k = 0; k < hv.size(); ++k) kernel += std::abs(hv(k)) < 1e-12;
  EXPECT_EQ(kernel, 4);
}

TEST(Xxz, ParameterRelations) {
  EXPECT_DOUBLE_EQ(xxz_delta(1.0), 1.0);
  EXPECT_DOUBLE_EQ(xxz_delta(0.5), 1.25);
  EXPECT_NEAR(xxz_q_from_delta(1.25), 0.5, 1e-15);
  // The boundary coefficient at q = 0.5 is 0.3: entry <01|H|01> of the bond.
  const DenseMatrix b = xxz_suq2_bond(0.5);
  EXPECT_NEAR(b(1, 1).real(), 0.5 + 0.3 * (-1.0), 1e-15);
  EXPECT_NEAR(b(2, 2).real(), 0.5 + 0.3 * (1.0), 1e-15);
  EXPECT_THROW(xxz_suq2_bond(0.0), DomainError);
  EXPECT_THROW(xxz_suq2_bond(1.2), DomainError);
  EXPECT_THROW(xxz_suq2_chain(1, 0.5), DomainError);
}

TEST(Xxz, TwoSiteSpectrumForAnyQ) {
  for (double q : {0.1, 0.3, 0.5, 0.9, 1.0}) expect_spectrum(xxz_suq2_chain(2, q), {0, 0, 0, 1}, 1e-14);
}

TEST(Xxz, QEqualsOneIsHeisenbergPlusConstantBitwise) {
  for (int length : {2, 4, 7}) {
    const Volume v = build_volume({length}, Boundary::open, 2);
    const Operator xxz = xxz_suq2_chain(length, 1.0);
    const Operator ref = assemble_hamiltonian(heisenberg(1.0, kSpinHalf), v) +
                         0.25 * (length - 1) * Operator::identity(*v.hilbert_dim());
    EXPECT_TRUE(xxz.to_dense() == ref.to_dense()) << "L=" << length;
  }
}

TEST(Xxz, ContinuousInQ) {
  const DenseMatrix a = xxz_suq2_chain(5, 0.6).to_dense();
  const DenseMatrix b = xxz_suq2_chain(5, 0.6 + 1e-7).to_dense();
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(LambdaNorm, Examples) {
  EXPECT_DOUBLE_EQ(lambda_norm(Interaction(2), 1.0, 1), 0.0);
  EXPECT_NEAR(lambda_norm(heisenberg(1.0, kSpinHalf), 0.0, 1), 1.5, 1e-14);
  EXPECT_NEAR(lambda_norm(heisenberg(-1.0, kSpinHalf), 1.0, 1), 1.5 * std::exp(2.0), 1e-12);
  EXPECT_NEAR(lambda_norm(heisenberg(1.0, kSpinHalf), 1.0, 1), 11.0836, 1e-4);
  EXPECT_THROW(lambda_norm(xxz_suq2_interaction(4, 0.5), 0.0, 1), UnsupportedError);
  const Interaction phi = heisenberg(1.0, kSpinOne) + zeeman(0.4, kSpinOne);
  double prev = -1.0;
  for (double lambda = 0.0; lambda <= 3.0; lambda += 0.25) {
    const double n = lambda_norm(phi, lambda, 2);
    EXPECT_GE(n, prev);
    prev = n;
  }
}

TEST(Interaction, RejectsNonHermitianAndMisSizedTerms) {
  Interaction phi(2);
  DenseMatrix a = DenseMatrix::Zero(2, 2);
  a(0, 1) = 1.0;
  EXPECT_THROW(phi.add_onsite(a), DomainError);
  EXPECT_THROW(phi.add_bond(DenseMatrix::Identity(2, 2)), DimensionError);
  EXPECT_THROW(phi.add_term({1, 0}, DenseMatrix::Identity(4, 4)), DomainError);
}

TEST(ModelSpec, MakeInteraction) {
  const Volume ring = build_volume({4}, Boundary::periodic, 2);
  EXPECT_THROW(make_interaction(ModelSpec{"xxz_suq2", 1, 0, 0.5, 1}, ring), DomainError);
  EXPECT_THROW(make_interaction(ModelSpec{"potts"}, ring), DomainError);
  EXPECT_EQ(model_local_dim(ModelSpec{"heisenberg", 1, 0, 1, 3}), 4);
  EXPECT_EQ(model_local_dim(ModelSpec{"aklt"}), 3);
}
