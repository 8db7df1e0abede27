#pragma once

// Seeded random local observables for the verification sweeps.

#include <cstdint>
#include <random>

#include "qspin/lattice.hpp"
#include "qspin/linalg.hpp"
#include "qspin/operator.hpp"

namespace qspin {

/// Complex Gaussian matrix with independent N(0,1) real and imaginary parts.
inline DenseMatrix random_matrix(Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  DenseMatrix m(dim, dim);
  for (Index j = 0; j < dim; ++j)
    for (Index i = 0; i < dim; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      m(i, j) = Complex(re, im);
    }
  return m;
}

/// Random operator supported on one random site or one random edge (equal
/// odds when the volume has edges), embedded into the full space.
inline Operator random_local_operator(const Volume& v, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  if (!v.edges().empty() && coin(rng) == 1) {
    std::uniform_int_distribution<std::size_t> pick(0, v.edges().size() - 1);
    const auto [a, b] = v.edges()[pick(rng)];
    return embed(random_matrix(v.local_dim() * v.local_dim(), rng), {a, b}, v);
  }
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  return embed(random_matrix(v.local_dim(), rng), {pick(rng)}, v);
}

}  // namespace qspin
