#pragma once

#include <random>

#include "torus/glattice.hpp"

namespace torus::testing {

inline IntMatrix random_unimodular(std::mt19937& rng, std::size_t n) {
  IntMatrix U = IntMatrix::identity(n);
  std::uniform_int_distribution<int> d(-2, 2);
  for (std::size_t step = 0; step < 3 * n; ++step) {
    std::size_t i = rng() % n, j = rng() % n;
    if (i != j) U.add_row_multiple(i, j, d(rng));
  }
  return U;
}

inline GLattice conjugated(const GLattice& M, const IntMatrix& U) {
  IntMatrix Ui = inverse_unimodular(U);
  std::vector<IntMatrix> acts;
  for (auto& A : M.generator_actions()) acts.push_back(U * A * Ui);
  return GLattice::trusted(M.group(), acts);
}

// Random G-lattice of rank at most max_rank: a sum of coset lattices, augmentation
// kernels and their duals, in a scrambled basis.
inline GLattice random_lattice(std::mt19937& rng, const GroupPtr& G, std::size_t max_rank) {
  auto subs = all_subgroups(G);
  std::vector<GLattice> parts;
  std::size_t rank = 0;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const Subgroup& H = subs[rng() % subs.size()];
    GLattice piece = permutation_lattice(H);
    switch (rng() % 3) {
      case 0: break;
      case 1:
        if (piece.rank() > 1) piece = kernel_lattice(augmentation(H));
        break;
      case 2:
        if (piece.rank() > 1) piece = dual(kernel_lattice(augmentation(H)));
        break;
    }
    if (rank + piece.rank() > max_rank) continue;
    rank += piece.rank();
    parts.push_back(piece);
  }
  if (parts.empty()) parts.push_back(trivial_lattice(G));
  GLattice M = direct_sum(parts);
  return conjugated(M, random_unimodular(rng, M.rank()));
}

}  // namespace torus::testing
