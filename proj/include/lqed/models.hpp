#pragma once

#include <vector>

#include "lqed/hilbert.hpp"

namespace lqed {

enum class ModelFamily { qed, hobm, qlm_spin, qlm_boson };

struct Connection {
  BasisState target;
  cplx amplitude;
};

// Mass terms count particles, so the bare vacuum sits at zero energy.
double model_diagonal(ModelFamily f, const LatticeSpec& lat, const BasisState& s, const ModelParams& p);
void model_connections(ModelFamily f, const LatticeSpec& lat, const BasisState& s, const ModelParams& p,
                       std::vector<Connection>& out);

// Assembles H on the given basis; connections leaving the basis are dropped.
SparseOp build_model(ModelFamily f, const Basis& basis, const ModelParams& p);

SparseOp build_qed(const Basis& basis, const ModelParams& p);
SparseOp build_hobm(const Basis& basis, const ModelParams& p);
SparseOp build_qlm(const Basis& basis, const ModelParams& p, ModelFamily form);

// Unprojected basis reachable from the seeds under the model's off-diagonal
// moves, with links and matter kept inside their ranges.
Basis closure_basis(ModelFamily f, const LatticeSpec& lat, const ModelParams& p,
                    const std::vector<BasisState>& seeds, std::size_t cap = kDimensionCap);

// Diagonal of the order-parameter operator.
RVec electric_observable(const Basis& basis);

double expectation(const RVec& diag, const Vec& psi);

BasisState string_configuration(const LatticeSpec& lat);
BasisState two_meson_configuration(const LatticeSpec& lat);
// |g e g e ...> on the ion spins with empty matter modes.
BasisState false_vacuum_configuration(const LatticeSpec& lat);
Vec product_state(const Basis& basis, const BasisState& s);
Vec string_state(const Basis& basis);

// Zero-hopping energy of a charge pattern on an open chain.
double classical_energy(const std::vector<int>& charges, const ModelParams& p, double alpha = 0.0);
std::vector<int> string_charges(int L);
std::vector<int> two_meson_charges(int L);
// Smallest L >= 4 for which the two-meson pattern does not cost more than the
// string (degenerate counts as broken).
int string_breaking_length(double mu, double V, int L_max = 100000);

}  // namespace lqed
