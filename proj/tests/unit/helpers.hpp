#pragma once

#include "lqed/hilbert.hpp"

namespace lqed::test {

// Frobenius norm of [H, G_i] maximized over sites. G_i is diagonal, so the
// commutator entries are H_jk (g_k - g_j).
inline double gauss_commutator(const SparseOp& H, const Basis& b) {
  const int sites = b.lattice().num_constrained_sites();
  std::vector<std::vector<double>> g(b.size());
  for (std::size_t k = 0; k < b.size(); ++k) g[k] = gauss_values(b.lattice(), b.state(k));
  std::vector<double> acc(sites, 0.0);
  for (Eigen::Index r = 0; r < H.outerSize(); ++r)
    for (SparseOp::InnerIterator it(H, r); it; ++it)
      for (int i = 0; i < sites; ++i) acc[i] += std::norm(it.value() * (g[it.col()][i] - g[r][i]));
  double worst = 0.0;
  for (double a : acc) worst = std::max(worst, std::sqrt(a));
  return worst;
}

inline double hermiticity_defect(const SparseOp& H) { return (SparseOp(H.adjoint()) - H).norm(); }

inline SparseOp with_diagonal(SparseOp H, const RVec& d) {
  for (Eigen::Index i = 0; i < d.size(); ++i) H.coeffRef(i, i) += d[i];
  return H;
}

}  // namespace lqed::test
