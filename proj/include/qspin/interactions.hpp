#pragma once

// Interactions (site set -> local Hermitian term), the built-in models, the
// lambda-norm and Hamiltonian assembly.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qspin/errors.hpp"
#include "qspin/lattice.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"
#include "qspin/spin_algebra.hpp"

namespace qspin {

/// A term pinned to an explicit, sorted list of site ranks.
struct SiteTerm {
  std::vector<std::size_t> sites;
  DenseMatrix op;
};

/// (A + A^dagger) / 2, which is exactly Hermitian in floating point.
inline DenseMatrix hermitize(const DenseMatrix& a) { return 0.5 * (a + a.adjoint()); }

/// Finite-range interaction.
///
/// Translation-invariant parts are an on-site term applied to every site and
/// a bond term applied to every nearest-neighbor edge (x, y), x before y in
/// rank order. Non-invariant parts are explicit terms on fixed site sets.
class Interaction {
 public:
  explicit Interaction(Index local_dim) : local_dim_(local_dim) {
    if (local_dim < 2) throw DomainError("interaction: local dimension must be >= 2");
  }

  Index local_dim() const { return local_dim_; }
  const std::optional<DenseMatrix>& onsite() const { return onsite_; }
  const std::optional<DenseMatrix>& bond() const { return bond_; }
  const std::vector<SiteTerm>& explicit_terms() const { return explicit_; }
  bool translation_invariant() const { return explicit_.empty(); }
  bool empty() const { return !onsite_ && !bond_ && explicit_.empty(); }

  /// Range: largest site-set diameter carrying a term (0 for on-site only).
  double range() const {
    double r = 0.0;
    if (bond_) r = 1.0;
    for (const auto& t : explicit_)
      if (t.sites.size() > 1) r = std::max(r, static_cast<double>(t.sites.back() - t.sites.front()));
    return r;
  }

  Interaction& add_onsite(const DenseMatrix& op) {
    check_term(op, 1, "on-site");
    onsite_ = onsite_ ? DenseMatrix(*onsite_ + op) : op;
    return *this;
  }

  Interaction& add_bond(const DenseMatrix& op) {
    check_term(op, 2, "bond");
    bond_ = bond_ ? DenseMatrix(*bond_ + op) : op;
    return *this;
  }

  Interaction& add_term(std::vector<std::size_t> sites, const DenseMatrix& op) {
    if (!std::is_sorted(sites.begin(), sites.end()) ||
        std::adjacent_find(sites.begin(), sites.end()) != sites.end() || sites.empty()) {
      throw DomainError("interaction: explicit term sites must be non-empty, sorted and distinct");
    }
    check_term(op, sites.size(), "explicit");
    for (auto& t : explicit_) {
      if (t.sites == sites) {
        t.op += op;
        return *this;
      }
    }
    explicit_.push_back(SiteTerm{std::move(sites), op});
    return *this;
  }

  /// phi(X) for a sorted site set X of `v`; an empty matrix means phi(X) = 0.
  DenseMatrix term(const std::vector<std::size_t>& x, const Volume& v) const {
    DenseMatrix out;
    auto accumulate = [&](const DenseMatrix& op) { out = out.size() == 0 ? op : DenseMatrix(out + op); };
    if (x.size() == 1 && onsite_) accumulate(*onsite_);
    if (x.size() == 2 && bond_ && v.adjacent(x[0], x[1])) accumulate(*bond_);
    for (const auto& t : explicit_)
      if (t.sites == x) accumulate(t.op);
    return out;
  }

  friend Interaction operator+(Interaction a, const Interaction& b) {
    if (a.local_dim_ != b.local_dim_) throw DimensionError("interaction sum: local dimensions differ");
    if (b.onsite_) a.add_onsite(*b.onsite_);
    if (b.bond_) a.add_bond(*b.bond_);
    for (const auto& t : b.explicit_) a.add_term(t.sites, t.op);
    return a;
  }

 private:
  void check_term(const DenseMatrix& op, std::size_t sites, const char* what) const {
    Index d = 1;
    for (std::size_t k = 0; k < sites; ++k) d *= local_dim_;
    if (op.rows() != d || op.cols() != d) throw DimensionError(std::string("interaction: ") + what + " term has wrong size");
    if (hermiticity_defect(op) != 0.0) throw DomainError(std::string("interaction: ") + what + " term is not Hermitian");
  }

  Index local_dim_;
  std::optional<DenseMatrix> onsite_;
  std::optional<DenseMatrix> bond_;
  std::vector<SiteTerm> explicit_;
};

/// phi({x,y}) = -J S_x . S_y on nearest neighbors. J > 0 is ferromagnetic.
inline Interaction heisenberg(double j, SpinQuantumNumber s) {
  if (j == 0.0) throw DomainError("heisenberg: J must be nonzero");
  Interaction phi(s.dim());
  phi.add_bond(hermitize(-j * spin_dot(s)));
  return phi;
}

/// On-site term -h S^3.
inline Interaction zeeman(double h, SpinQuantumNumber s) {
  Interaction phi(s.dim());
  phi.add_onsite(-h * spin_matrices(s).s3);
  return phi;
}

/// XY model in a longitudinal field: -(S1 S1 + S2 S2) on bonds, -h S3 on sites.
inline Interaction xy_field(double h) {
  const SpinOperators ops = spin_matrices(kSpinHalf);
  const DenseMatrix xy = Eigen::kroneckerProduct(ops.s1, ops.s1).eval() + Eigen::kroneckerProduct(ops.s2, ops.s2).eval();
  Interaction phi(2);
  phi.add_bond(hermitize(-xy));
  phi.add_onsite(-h * ops.s3);
  return phi;
}

/// Ising model: -J S3 S3 on bonds, -h S3 on sites. Diagonal in the product basis.
inline Interaction ising(double j, double h) {
  const SpinOperators ops = spin_matrices(kSpinHalf);
  Interaction phi(2);
  phi.add_bond(-j * DenseMatrix(Eigen::kroneckerProduct(ops.s3, ops.s3)));
  phi.add_onsite(-h * ops.s3);
  return phi;
}

/// Spin-1 bond projector onto total bond spin 2:
/// P = S.S / 2 + (S.S)^2 / 6 + 1/3.
inline DenseMatrix aklt_projector() {
  const DenseMatrix dot = spin_dot(kSpinOne);
  return hermitize(0.5 * dot + (dot * dot) / 6.0 + DenseMatrix::Identity(9, 9) / 3.0);
}

inline Interaction aklt() {
  Interaction phi(3);
  phi.add_bond(aklt_projector());
  return phi;
}

/// Delta = (q + 1/q) / 2.
inline double xxz_delta(double q) { return 0.5 * (q + 1.0 / q); }

/// Inverse of xxz_delta on q in (0, 1]: q = Delta - sqrt(Delta^2 - 1).
inline double xxz_q_from_delta(double delta) {
  if (!(delta >= 1.0)) throw DomainError("xxz: Delta must be >= 1");
  return delta - std::sqrt(delta * delta - 1.0);
}

/// Bond term of the SU_q(2)-invariant XXZ chain on sites (x, x+1):
/// -(S1 S1 + S2 S2)/Delta - (S3 S3 - 1/4) + sqrt(1 - Delta^-2)/2 (S3_{x+1} - S3_x).
inline DenseMatrix xxz_suq2_bond(double q) {
  if (!(q > 0.0 && q <= 1.0)) throw DomainError("xxz_suq2: q must lie in (0, 1]");
  const double delta = xxz_delta(q);
  const double boundary = 0.5 * std::sqrt(1.0 - 1.0 / (delta * delta));
  const SpinOperators ops = spin_matrices(kSpinHalf);
  const DenseMatrix id2 = ops.identity;
  const DenseMatrix xy = Eigen::kroneckerProduct(ops.s1, ops.s1).eval() + Eigen::kroneckerProduct(ops.s2, ops.s2).eval();
  const DenseMatrix zz = Eigen::kroneckerProduct(ops.s3, ops.s3);
  const DenseMatrix field = Eigen::kroneckerProduct(id2, ops.s3).eval() - Eigen::kroneckerProduct(ops.s3, id2).eval();
  const DenseMatrix bond = -(1.0 / delta) * xy - (zz - 0.25 * DenseMatrix::Identity(4, 4)) + boundary * field;
  return hermitize(bond);
}

/// SU_q(2)-invariant XXZ chain as explicit bond terms on an open chain of L sites.
inline Interaction xxz_suq2_interaction(int length, double q) {
  if (length < 2) throw DomainError("xxz_suq2: L must be >= 2");
  const DenseMatrix bond = xxz_suq2_bond(q);
  Interaction phi(2);
  for (int x = 0; x + 1 < length; ++x)
    phi.add_term({static_cast<std::size_t>(x), static_cast<std::size_t>(x + 1)}, bond);
  return phi;
}

struct AssemblyOptions {
  std::optional<Storage> storage;  // default: dense up to the dense cap
  DimensionCaps caps = default_caps();
};

/// H = sum over X of phi(X): on-site terms over sites, bond terms over edges,
/// explicit terms as given. Finite range makes this the full subset sum.
inline Operator assemble_hamiltonian(const Interaction& phi, const Volume& v, const AssemblyOptions& opt = {}) {
  if (phi.local_dim() != v.local_dim()) throw DimensionError("assemble_hamiltonian: local dimensions differ");
  const auto hd = v.hilbert_dim();
  if (!hd || *hd > opt.caps.sparse) {
    throw ResourceError("assemble_hamiltonian: Hilbert dimension exceeds the cap " + std::to_string(opt.caps.sparse));
  }
  const Index dim = *hd;
  const Storage storage = opt.storage.value_or(dim <= opt.caps.dense ? Storage::dense : Storage::sparse);
  if (storage == Storage::dense && dim > opt.caps.dense) {
    throw ResourceError("assemble_hamiltonian: dense dimension " + std::to_string(dim) + " exceeds the dense cap");
  }
  for (const auto& t : phi.explicit_terms())
    if (t.sites.back() >= v.size()) throw DomainError("assemble_hamiltonian: explicit term outside the volume");

  // Each term is embedded sparsely and summed in a fixed order, so the result
  // is exactly Hermitian whenever every term is.
  SparseMatrix h(dim, dim);
  auto add = [&](const DenseMatrix& op, std::span<const std::size_t> support) {
    h += embed(op, support, v, Storage::sparse).sparse();
  };
  if (phi.onsite()) {
    for (std::size_t r = 0; r < v.size(); ++r) {
      const std::size_t support[] = {r};
      add(*phi.onsite(), support);
    }
  }
  if (phi.bond()) {
    for (const auto& [a, b] : v.edges()) {
      const std::size_t support[] = {a, b};
      add(*phi.bond(), support);
    }
  }
  for (const auto& t : phi.explicit_terms()) add(t.op, t.sites);
  h.prune(Complex(0.0, 0.0), 0.0);
  Operator out(std::move(h));
  const bool exact = out.hermiticity_defect() == 0.0;
  Operator tagged = exact ? Operator(out.sparse(), true) : out;
  return tagged.as(storage);
}

/// sum over X containing the origin of e^{lambda |X|} ||phi(X)|| for a
/// translation-invariant interaction on Z^d.
inline double lambda_norm(const Interaction& phi, double lambda, int d) {
  if (!phi.translation_invariant()) throw UnsupportedError("lambda_norm: interaction is not translation invariant");
  if (lambda < 0.0) throw DomainError("lambda_norm: lambda must be >= 0");
  if (d < 1) throw DomainError("lambda_norm: dimension must be >= 1");
  double total = 0.0;
  if (phi.onsite()) total += std::exp(lambda) * operator_norm(*phi.onsite());
  // The origin lies in 2d nearest-neighbor pairs {0, +-e_k}.
  if (phi.bond()) total += 2.0 * d * std::exp(2.0 * lambda) * operator_norm(*phi.bond());
  return total;
}

/// Declarative model description used by the command-line front end.
struct ModelSpec {
  std::string name;  // heisenberg | xxz_suq2 | xy_field | ising | aklt
  double j = 1.0;
  double h = 0.0;
  double q = 1.0;
  int two_s = 1;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

inline bool is_known_model(const std::string& name) {
  return name == "heisenberg" || name == "xxz_suq2" || name == "xy_field" || name == "ising" || name == "aklt";
}

/// Local dimension the model requires.
inline Index model_local_dim(const ModelSpec& m) {
  if (m.name == "heisenberg") return SpinQuantumNumber(m.two_s).dim();
  if (m.name == "aklt") return 3;
  if (is_known_model(m.name)) return 2;
  throw DomainError("unknown model '" + m.name + "'");
}

/// Interaction for a model on `v`. The XXZ chain needs an open chain volume.
inline Interaction make_interaction(const ModelSpec& m, const Volume& v) {
  if (m.name == "heisenberg") {
    Interaction phi = heisenberg(m.j, SpinQuantumNumber(m.two_s));
    if (m.h != 0.0) phi = phi + zeeman(m.h, SpinQuantumNumber(m.two_s));
    return phi;
  }
  if (m.name == "xy_field") return xy_field(m.h);
  if (m.name == "ising") return ising(m.j, m.h);
  if (m.name == "aklt") return aklt();
  if (m.name == "xxz_suq2") {
    if (!v.is_chain() || v.boundary() != Boundary::open) {
      throw DomainError("xxz_suq2 is defined on an open chain only");
    }
    return xxz_suq2_interaction(static_cast<int>(v.size()), m.q);
  }
  throw DomainError("unknown model '" + m.name + "'");
}

/// Full Hamiltonian H_L of the SU_q(2)-invariant XXZ chain (spin 1/2, open).
inline Operator xxz_suq2_chain(int length, double q, const AssemblyOptions& opt = {}) {
  const Interaction phi = xxz_suq2_interaction(length, q);
  return assemble_hamiltonian(phi, build_volume({length}, Boundary::open, 2, opt.caps.sparse), opt);
}

}  // namespace qspin
