#pragma once

#include <optional>
#include <utility>
#include <variant>

#include "qspin/errors.hpp"
#include "qspin/linalg.hpp"

namespace qspin {

enum class Storage { dense, sparse };

/// Square complex matrix on a Hilbert space, held either densely or as a
/// compressed sparse matrix. Values are immutable once built.
class Operator {
 public:
  Operator() : data_(DenseMatrix(0, 0)) {}

  explicit Operator(DenseMatrix m, std::optional<bool> hermitian = std::nullopt)
      : data_(std::move(m)), hermitian_(hermitian) {
    check_square();
  }

  explicit Operator(SparseMatrix m, std::optional<bool> hermitian = std::nullopt)
      : data_(std::move(m)), hermitian_(hermitian) {
    check_square();
    std::get<SparseMatrix>(data_).makeCompressed();
  }

  static Operator identity(Index dim, Storage storage = Storage::dense) {
    if (storage == Storage::dense) return Operator(DenseMatrix::Identity(dim, dim), true);
    SparseMatrix s(dim, dim);
    s.setIdentity();
    return Operator(std::move(s), true);
  }

  static Operator zero(Index dim, Storage storage = Storage::dense) {
    if (storage == Storage::dense) return Operator(DenseMatrix::Zero(dim, dim), true);
    return Operator(SparseMatrix(dim, dim), true);
  }

  Index dim() const {
    return std::visit([](const auto& m) { return static_cast<Index>(m.rows()); }, data_);
  }
  Storage storage() const { return is_dense() ? Storage::dense : Storage::sparse; }
  bool is_dense() const { return std::holds_alternative<DenseMatrix>(data_); }

  const DenseMatrix& dense() const {
    if (!is_dense()) throw UnsupportedError("operator is stored sparse");
    return std::get<DenseMatrix>(data_);
  }
  const SparseMatrix& sparse() const {
    if (is_dense()) throw UnsupportedError("operator is stored dense");
    return std::get<SparseMatrix>(data_);
  }

  /// Dense copy. Refuses above `cap` to keep memory bounded.
  DenseMatrix to_dense(Index cap = default_caps().dense) const {
    if (is_dense()) return dense();
    if (dim() > cap) {
      throw ResourceError("dense form of a " + std::to_string(dim()) +
                          "-dimensional operator exceeds the dense cap " + std::to_string(cap));
    }
    return DenseMatrix(sparse());
  }

  SparseMatrix to_sparse() const {
    if (!is_dense()) return sparse();
    SparseMatrix s = dense().sparseView(0.0, 0.0);
    s.makeCompressed();
    return s;
  }

  Operator as(Storage storage) const {
    if (storage == this->storage()) return *this;
    return storage == Storage::dense ? Operator(to_dense(), hermitian_) : Operator(to_sparse(), hermitian_);
  }

  /// Known Hermiticity (set by constructors that guarantee it), if any.
  std::optional<bool> hermitian_hint() const { return hermitian_; }

  /// Largest |entry| of A - A^dagger (0 for exactly Hermitian input).
  double hermiticity_defect() const {
    return std::visit([](const auto& m) { return qspin::hermiticity_defect(m); }, data_);
  }

  bool is_hermitian(double tolerance = 0.0) const {
    if (hermitian_ && *hermitian_ && tolerance >= 0.0) return true;
    return hermiticity_defect() <= tolerance;
  }

  Vector apply(const Vector& v) const {
    if (v.size() != dim()) throw DimensionError("apply: vector length does not match operator");
    return std::visit([&](const auto& m) -> Vector { return m * v; }, data_);
  }

  DenseMatrix apply(const DenseMatrix& block) const {
    if (block.rows() != dim()) throw DimensionError("apply: block rows do not match operator");
    return std::visit([&](const auto& m) -> DenseMatrix { return m * block; }, data_);
  }

  Operator adjoint() const {
    if (is_dense()) return Operator(DenseMatrix(dense().adjoint()), hermitian_);
    return Operator(SparseMatrix(sparse().adjoint()), hermitian_);
  }

  Complex trace() const {
    if (is_dense()) return dense().trace();
    Complex t{0.0, 0.0};
    for (Index i = 0; i < dim(); ++i) t += sparse().coeff(i, i);
    return t;
  }

  /// Largest |entry| of the difference; dimension mismatch gives +inf.
  double max_abs_difference(const Operator& other) const {
    if (other.dim() != dim()) return std::numeric_limits<double>::infinity();
    if (is_dense() || other.is_dense()) return max_abs_entry(to_dense() - other.to_dense());
    const SparseMatrix diff = sparse() - other.sparse();
    double worst = 0.0;
    for (Index k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
  }

  /// Exact entrywise equality.
  bool equals(const Operator& other) const {
    if (other.dim() != dim()) return false;
    if (is_dense() && other.is_dense()) return dense() == other.dense();
    return max_abs_difference(other) == 0.0;
  }

  friend Operator operator+(const Operator& a, const Operator& b) { return combine(a, b, 1.0); }
  friend Operator operator-(const Operator& a, const Operator& b) { return combine(a, b, -1.0); }

  friend Operator operator*(const Operator& a, const Operator& b) {
    same_dims(a, b, "product");
    if (a.is_dense() && b.is_dense()) return Operator(DenseMatrix(a.dense() * b.dense()));
    if (!a.is_dense() && !b.is_dense()) return Operator(SparseMatrix(a.sparse() * b.sparse()));
    if (a.is_dense()) return Operator(DenseMatrix(a.dense() * b.sparse()));
    return Operator(DenseMatrix(a.sparse() * b.dense()));
  }

  friend Operator operator*(Complex s, const Operator& a) {
    const bool real = s.imag() == 0.0;
    std::optional<bool> h = real ? a.hermitian_ : std::nullopt;
    if (a.is_dense()) return Operator(DenseMatrix(s * a.dense()), h);
    return Operator(SparseMatrix(s * a.sparse()), h);
  }
  friend Operator operator*(double s, const Operator& a) { return Complex(s, 0.0) * a; }
  friend Operator operator*(const Operator& a, Complex s) { return s * a; }
  friend Operator operator*(const Operator& a, double s) { return Complex(s, 0.0) * a; }

 private:
  static void same_dims(const Operator& a, const Operator& b, const char* what) {
    if (a.dim() != b.dim()) {
      throw DimensionError(std::string(what) + ": dimension mismatch (" + std::to_string(a.dim()) +
                           " vs " + std::to_string(b.dim()) + ")");
    }
  }

  static Operator combine(const Operator& a, const Operator& b, double sign) {
    same_dims(a, b, "sum");
    std::optional<bool> h;
    if (a.hermitian_ && b.hermitian_ && *a.hermitian_ && *b.hermitian_) h = true;
    if (a.is_dense() || b.is_dense()) {
      return Operator(DenseMatrix(a.to_dense() + sign * b.to_dense()), h);
    }
    return Operator(SparseMatrix(a.sparse() + sign * b.sparse()), h);
  }

  void check_square() const {
    std::visit(
        [](const auto& m) {
          if (m.rows() != m.cols()) throw DimensionError("operator must be square");
        },
        data_);
  }

  std::variant<DenseMatrix, SparseMatrix> data_;
  std::optional<bool> hermitian_;
};

/// [A, B] = AB - BA.
inline Operator commutator(const Operator& a, const Operator& b) {
  if (a.dim() != b.dim()) throw DimensionError("commutator: dimension mismatch");
  return a * b - b * a;
}

inline DenseMatrix commutator(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionError("commutator: dimension mismatch");
  return a * b - b * a;
}

}  // namespace qspin
