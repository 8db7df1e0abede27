#pragma once

// Finite volumes, tensor-slot indexing, local-operator embedding and
// site-permutation unitaries.
//
// Product basis: a basis index is the base-n number whose digits are the
// local states of the sites, read in rank order with rank 0 the most
// significant digit. Local state 0 is m = S. This matches the ordering of a
// Kronecker product A_0 (x) A_1 (x) ... (x) A_{N-1}.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qspin/errors.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"

namespace qspin {

enum class Boundary { open, periodic };

inline std::string to_string(Boundary b) { return b == Boundary::open ? "open" : "periodic"; }

struct Site {
  std::vector<int> coords;
  friend auto operator<=>(const Site&, const Site&) = default;
};

using Edge = std::pair<std::size_t, std::size_t>;

/// A finite set of sites with nearest-neighbor edges. Sites are stored in rank
/// order, so a site's rank is its position in `sites()`.
class Volume {
 public:
  Volume(std::vector<int> dims, Boundary boundary, std::vector<Site> sites, std::vector<Edge> edges,
         Index local_dim)
      : dims_(std::move(dims)),
        boundary_(boundary),
        sites_(std::move(sites)),
        edges_(std::move(edges)),
        local_dim_(local_dim) {
    for (std::size_t r = 0; r < sites_.size(); ++r) {
      if (!rank_.emplace(sites_[r], r).second) throw DomainError("volume: duplicate site");
    }
  }

  const std::vector<int>& dims() const { return dims_; }
  std::size_t dimension() const { return dims_.size(); }
  Boundary boundary() const { return boundary_; }
  const std::vector<Site>& sites() const { return sites_; }
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t size() const { return sites_.size(); }
  Index local_dim() const { return local_dim_; }
  bool is_lattice() const { return !dims_.empty(); }
  bool is_chain() const { return dims_.size() == 1; }

  /// n^|Lambda|, or nullopt on overflow of the index type.
  std::optional<Index> hilbert_dim() const {
    Index d = 1;
    for (std::size_t k = 0; k < sites_.size(); ++k) {
      if (d > std::numeric_limits<Index>::max() / local_dim_) return std::nullopt;
      d *= local_dim_;
    }
    return d;
  }

  std::size_t rank(const Site& s) const {
    const auto it = rank_.find(s);
    if (it == rank_.end()) throw DomainError("site is not in the volume");
    return it->second;
  }

  bool contains(const Site& s) const { return rank_.count(s) != 0; }

  /// Rank of the site at `coords`, wrapping periodic directions; nullopt if
  /// the coordinates fall outside an open box.
  std::optional<std::size_t> site_at(std::vector<int> coords) const {
    if (coords.size() != dims_.size()) return std::nullopt;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      if (boundary_ == Boundary::periodic) {
        coords[k] = ((coords[k] % dims_[k]) + dims_[k]) % dims_[k];
      } else if (coords[k] < 0 || coords[k] >= dims_[k]) {
        return std::nullopt;
      }
    }
    const auto it = rank_.find(Site{coords});
    if (it == rank_.end()) return std::nullopt;
    return it->second;
  }

  /// Graph distance along the lattice (minimum image for periodic volumes).
  int lattice_distance(std::size_t a, std::size_t b) const {
    int d = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) {
      int delta = std::abs(sites_[a].coords[k] - sites_[b].coords[k]);
      if (boundary_ == Boundary::periodic) delta = std::min(delta, dims_[k] - delta);
      d += delta;
    }
    return d;
  }

  bool adjacent(std::size_t a, std::size_t b) const {
    const Edge e{std::min(a, b), std::max(a, b)};
    return std::binary_search(edges_.begin(), edges_.end(), e);
  }

 private:
  std::vector<int> dims_;
  Boundary boundary_;
  std::vector<Site> sites_;
  std::vector<Edge> edges_;  // (lower rank, higher rank), sorted, unique
  Index local_dim_;
  std::map<Site, std::size_t> rank_;
};

namespace detail {

inline void check_hilbert_cap(const Volume& v, Index cap) {
  const auto d = v.hilbert_dim();
  if (!d || *d > cap) {
    throw ResourceError("Hilbert dimension " + std::to_string(v.local_dim()) + "^" + std::to_string(v.size()) +
                        " exceeds the cap " + std::to_string(cap));
  }
}

}  // namespace detail

/// Hypercubic box with lexicographic site order and nearest-neighbor edges.
/// Periodic directions of length 2 contribute a single edge per pair.
inline Volume build_volume(const std::vector<int>& dims, Boundary boundary, Index local_dim,
                           Index hilbert_cap = default_caps().sparse) {
  if (dims.empty()) throw DomainError("build_volume: need at least one dimension");
  for (int d : dims)
    if (d < 1) throw DomainError("build_volume: every extent must be >= 1");
  if (local_dim < 2) throw DomainError("build_volume: local dimension must be >= 2");

  std::size_t count = 1;
  for (int d : dims) count *= static_cast<std::size_t>(d);
  std::vector<Site> sites;
  sites.reserve(count);
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::vector<int> c(dims.size());
    std::size_t rest = idx;
    for (std::size_t k = dims.size(); k-- > 0;) {
      c[k] = static_cast<int>(rest % static_cast<std::size_t>(dims[k]));
      rest /= static_cast<std::size_t>(dims[k]);
    }
    sites.push_back(Site{std::move(c)});
  }
  std::set<Edge> edge_set;
  Volume proto(dims, boundary, sites, {}, local_dim);
  for (std::size_t r = 0; r < sites.size(); ++r) {
    for (std::size_t k = 0; k < dims.size(); ++k) {
      std::vector<int> nb = sites[r].coords;
      nb[k] += 1;
      const auto other = proto.site_at(nb);
      if (other && *other != r) edge_set.emplace(std::min(r, *other), std::max(r, *other));
    }
  }
  Volume v(dims, boundary, std::move(sites), std::vector<Edge>(edge_set.begin(), edge_set.end()), local_dim);
  detail::check_hilbert_cap(v, hilbert_cap);
  return v;
}

/// Explicit graph on sites 0..n-1 (coordinates are the 1-vectors (k)).
inline Volume graph_volume(std::size_t num_sites, const std::vector<Edge>& edges, Index local_dim,
                           Index hilbert_cap = default_caps().sparse) {
  if (num_sites < 1) throw DomainError("graph_volume: need at least one site");
  std::vector<Site> sites;
  for (std::size_t k = 0; k < num_sites; ++k) sites.push_back(Site{{static_cast<int>(k)}});
  std::set<Edge> edge_set;
  for (auto [a, b] : edges) {
    if (a >= num_sites || b >= num_sites || a == b) throw DomainError("graph_volume: invalid edge");
    edge_set.emplace(std::min(a, b), std::max(a, b));
  }
  Volume v({}, Boundary::open, std::move(sites), std::vector<Edge>(edge_set.begin(), edge_set.end()), local_dim);
  detail::check_hilbert_cap(v, hilbert_cap);
  return v;
}

/// Tensor-product strides: the weight of site rank r in a basis index.
inline std::vector<Index> basis_strides(const Volume& v) {
  std::vector<Index> strides(v.size());
  Index w = 1;
  for (std::size_t r = v.size(); r-- > 0;) {
    strides[r] = w;
    w *= v.local_dim();
  }
  return strides;
}

/// Local state of site rank r in basis index `index`.
inline Index basis_digit(Index index, std::size_t r, const std::vector<Index>& strides, Index n) {
  return (index / strides[r]) % n;
}

/// Acts as `local_op` on the sites in `support` (first listed = most
/// significant local digit) and as the identity elsewhere.
inline Operator embed(const DenseMatrix& local_op, std::span<const std::size_t> support, const Volume& v,
                      Storage storage) {
  const Index n = v.local_dim();
  Index local_dim = 1;
  for (std::size_t k = 0; k < support.size(); ++k) local_dim *= n;
  if (local_op.rows() != local_dim || local_op.cols() != local_dim) {
    throw DimensionError("embed: local operator is " + std::to_string(local_op.rows()) + "x" +
                         std::to_string(local_op.cols()) + ", support needs " + std::to_string(local_dim));
  }
  {
    std::set<std::size_t> seen;
    for (std::size_t s : support) {
      if (s >= v.size()) throw DomainError("embed: support site outside the volume");
      if (!seen.insert(s).second) throw DomainError("embed: support sites must be distinct");
    }
  }
  const auto hd = v.hilbert_dim();
  if (!hd) throw ResourceError("embed: Hilbert dimension overflows");
  const Index dim = *hd;
  if (storage == Storage::dense && dim > default_caps().dense) {
    throw ResourceError("embed: dense operator of dimension " + std::to_string(dim) + " exceeds the dense cap");
  }

  const std::vector<Index> strides = basis_strides(v);
  std::vector<Index> local_strides(support.size());
  {
    Index w = 1;
    for (std::size_t k = support.size(); k-- > 0;) {
      local_strides[k] = w;
      w *= n;
    }
  }
  // Nonzeros of each local column, and the global offset each local row adds.
  std::vector<std::vector<std::pair<Index, Complex>>> columns(local_dim);
  for (Index lc = 0; lc < local_dim; ++lc)
    for (Index lr = 0; lr < local_dim; ++lr)
      if (local_op(lr, lc) != Complex(0.0, 0.0)) columns[lc].emplace_back(lr, local_op(lr, lc));
  std::vector<Index> global_offset(local_dim, 0);
  for (Index l = 0; l < local_dim; ++l)
    for (std::size_t k = 0; k < support.size(); ++k)
      global_offset[l] += ((l / local_strides[k]) % n) * strides[support[k]];

  auto local_index = [&](Index col) {
    Index l = 0;
    for (std::size_t k = 0; k < support.size(); ++k) l += basis_digit(col, support[k], strides, n) * local_strides[k];
    return l;
  };

  const std::optional<bool> herm = hermiticity_defect(local_op) == 0.0 ? std::optional<bool>(true) : std::nullopt;
  if (storage == Storage::dense) {
    DenseMatrix out = DenseMatrix::Zero(dim, dim);
    for (Index col = 0; col < dim; ++col) {
      const Index lc = local_index(col);
      const Index base = col - global_offset[lc];
      for (const auto& [lr, val] : columns[lc]) out(base + global_offset[lr], col) = val;
    }
    return Operator(std::move(out), herm);
  }
  std::vector<Eigen::Triplet<Complex>> triplets;
  std::size_t nnz = 0;
  for (const auto& c : columns) nnz += c.size();
  triplets.reserve(static_cast<std::size_t>(dim / local_dim) * nnz);
  for (Index col = 0; col < dim; ++col) {
    const Index lc = local_index(col);
    const Index base = col - global_offset[lc];
    for (const auto& [lr, val] : columns[lc]) triplets.emplace_back(base + global_offset[lr], col, val);
  }
  SparseMatrix out(dim, dim);
  out.setFromTriplets(triplets.begin(), triplets.end());
  return Operator(std::move(out), herm);
}

inline Operator embed(const DenseMatrix& local_op, std::span<const std::size_t> support, const Volume& v) {
  const auto hd = v.hilbert_dim();
  const Storage storage = hd && *hd <= default_caps().dense ? Storage::dense : Storage::sparse;
  return embed(local_op, support, v, storage);
}

inline Operator embed(const DenseMatrix& local_op, std::initializer_list<std::size_t> support, const Volume& v) {
  return embed(local_op, std::span<const std::size_t>(support.begin(), support.size()), v);
}

inline Operator embed(const DenseMatrix& local_op, std::initializer_list<std::size_t> support, const Volume& v,
                      Storage storage) {
  return embed(local_op, std::span<const std::size_t>(support.begin(), support.size()), v, storage);
}

/// A bijection on site ranks: site r is sent to mapping[r].
class SitePermutation {
 public:
  explicit SitePermutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
    std::vector<bool> hit(mapping_.size(), false);
    for (std::size_t t : mapping_) {
      if (t >= mapping_.size() || hit[t]) throw DomainError("site permutation is not a bijection");
      hit[t] = true;
    }
  }

  static SitePermutation identity(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    return SitePermutation(std::move(m));
  }

  std::size_t size() const { return mapping_.size(); }
  std::size_t operator()(std::size_t r) const { return mapping_.at(r); }
  const std::vector<std::size_t>& mapping() const { return mapping_; }

  SitePermutation inverse() const {
    std::vector<std::size_t> inv(mapping_.size());
    for (std::size_t r = 0; r < mapping_.size(); ++r) inv[mapping_[r]] = r;
    return SitePermutation(std::move(inv));
  }

  /// (g * h)(r) = g(h(r)).
  friend SitePermutation operator*(const SitePermutation& g, const SitePermutation& h) {
    if (g.size() != h.size()) throw DimensionError("site permutation size mismatch");
    std::vector<std::size_t> m(g.size());
    for (std::size_t r = 0; r < g.size(); ++r) m[r] = g(h(r));
    return SitePermutation(std::move(m));
  }

  bool preserves_edges(const Volume& v) const {
    for (auto [a, b] : v.edges())
      if (!v.adjacent(mapping_[a], mapping_[b])) return false;
    return true;
  }

 private:
  std::vector<std::size_t> mapping_;
};

/// Translation by `shift` lattice steps along `axis` of a periodic box.
inline SitePermutation translation(const Volume& v, std::size_t axis, int shift = 1) {
  if (!v.is_lattice() || v.boundary() != Boundary::periodic) {
    throw UnsupportedError("translation requires a periodic lattice volume");
  }
  if (axis >= v.dimension()) throw DomainError("translation axis out of range");
  std::vector<std::size_t> m(v.size());
  for (std::size_t r = 0; r < v.size(); ++r) {
    std::vector<int> c = v.sites()[r].coords;
    c[axis] += shift;
    m[r] = *v.site_at(c);
  }
  return SitePermutation(std::move(m));
}

/// Open-chain mirror x -> L-1-x.
inline SitePermutation reflection(const Volume& v) {
  std::vector<std::size_t> m(v.size());
  for (std::size_t r = 0; r < v.size(); ++r) m[r] = v.size() - 1 - r;
  return SitePermutation(std::move(m));
}

/// Permutation matrix moving the local state of site r to site g(r):
/// U (x)_r phi_r = (x)_r phi_{g^{-1}(r)}. Satisfies U_g U_h = U_{gh}.
inline Operator permutation_unitary(const SitePermutation& g, const Volume& v) {
  if (g.size() != v.size()) throw DomainError("permutation_unitary: permutation does not act on this volume");
  const auto hd = v.hilbert_dim();
  if (!hd) throw ResourceError("permutation_unitary: Hilbert dimension overflows");
  const Index dim = *hd;
  const Index n = v.local_dim();
  const std::vector<Index> strides = basis_strides(v);
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(dim));
  for (Index in = 0; in < dim; ++in) {
    Index out = 0;
    for (std::size_t r = 0; r < v.size(); ++r) out += basis_digit(in, r, strides, n) * strides[g(r)];
    triplets.emplace_back(out, in, Complex(1.0, 0.0));
  }
  SparseMatrix u(dim, dim);
  u.setFromTriplets(triplets.begin(), triplets.end());
  Operator op(std::move(u));
  return dim <= default_caps().dense ? op.as(Storage::dense) : op;
}

}  // namespace qspin
