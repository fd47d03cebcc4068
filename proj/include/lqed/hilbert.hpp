#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lqed/common.hpp"

namespace lqed {

enum class Boundary { open, periodic };
enum class LinkKind { rotor, boson, spin_half };
enum class MatterKind { spin, boson };

// Stored link values: rotor -> E in [-lambda, lambda]; boson -> occupation n in
// [n_min, n_max] with E = n - offset; spin_half -> 0 (down) / 1 (up).
struct LinkSpec {
  LinkKind kind = LinkKind::rotor;
  int lambda = 0;
  int offset = 0;
  int n_min = 0;
  int n_max = 0;
};

// Sites are numbered 1..L. Site 1 is odd and hosts anti-charges; link k
// (0-based) joins sites k+1 and k+2, and under periodic boundary the last link
// joins L and 1.
struct LatticeSpec {
  int L = 0;
  Boundary boundary = Boundary::open;
  LinkSpec link;
  MatterKind matter = MatterKind::spin;
  int matter_max = 1;
  double alpha = 0.0;
  std::optional<int> total_charge;

  int num_links() const { return boundary == Boundary::open ? L - 1 : L; }
  // Sites whose Gauss law is enforced. Under open boundary the last site has
  // no right link and is left free.
  int num_constrained_sites() const { return boundary == Boundary::open ? L - 1 : L; }
  int link_low() const;
  int link_high() const;
  double field_of(int stored) const;
  void validate() const;
};

int default_rotor_cutoff(int L, double alpha);
int default_boson_window(int L);

LatticeSpec qed_lattice(int L, std::optional<int> lambda = {}, double alpha = 0.0);
LatticeSpec hobm_lattice(int L, int N, std::optional<int> window = {}, double alpha = 0.0);
LatticeSpec qlm_lattice(int L, MatterKind matter, int matter_max = 1);

struct BasisState {
  std::vector<int> matter;
  std::vector<int> links;
  bool operator==(const BasisState&) const = default;
};

std::uint64_t encode(const LatticeSpec& lat, const BasisState& s);
BasisState decode(const LatticeSpec& lat, std::uint64_t key);

class Basis {
 public:
  Basis(LatticeSpec lat, std::vector<std::uint64_t> keys, bool projected);

  const LatticeSpec& lattice() const { return lat_; }
  std::size_t size() const { return keys_.size(); }
  std::uint64_t key(std::size_t i) const { return keys_[i]; }
  const std::vector<std::uint64_t>& keys() const { return keys_; }
  std::optional<std::size_t> find(std::uint64_t key) const;
  std::optional<std::size_t> find(const BasisState& s) const;
  BasisState state(std::size_t i) const { return decode(lat_, keys_[i]); }
  bool gauss_projected() const { return projected_; }

 private:
  LatticeSpec lat_;
  std::vector<std::uint64_t> keys_;
  bool projected_;
};

// Charge q_i of site i (1-based) for spin matter with staggering.
int staggered_charge(int site, int spin_up);
std::vector<int> charges(const LatticeSpec& lat, const BasisState& s);
int total_charge(const LatticeSpec& lat, const BasisState& s);

// Value of G_i on a basis configuration, one entry per constrained site.
std::vector<double> gauss_values(const LatticeSpec& lat, const BasisState& s);

Basis enumerate_gauge_sector(const LatticeSpec& lat, std::size_t cap = kDimensionCap);
Basis enumerate_tensor_basis(const LatticeSpec& lat, std::size_t cap = kDimensionCap);

// ||G_i psi||^2 for each constrained site.
std::vector<double> gauss_violation(const Basis& basis, const Vec& psi);

// Gauge-eliminated long-range spin model. The operator is
//   constant + sum_j field_j tz_j + sum_{j<k} coupling_jk tz_j tz_k
//   + sum_i hop_i (tau+_i tau-_{i+1} + h.c.)
// where the hopping amplitude is -J times hop_modifier(E_new) and E_new is the
// field on link i after the hop, implied by the matter configuration.
struct SpinModelSpec {
  int L = 0;
  double J = 0.0;
  double constant = 0.0;
  RVec field;
  Eigen::MatrixXd coupling;
  LinkKind kind = LinkKind::rotor;
  int offset = 0;
  int e_min = 0;
  int e_max = 0;
  double alpha = 0.0;
  std::optional<int> total_charge;

  double hop_modifier(int e_new) const;
};

struct ModelParams {
  double J = 1.0;
  double mu = 0.0;
  double V = 0.0;
};

SpinModelSpec eliminate_gauge_field(const LatticeSpec& lat, const ModelParams& p);

// Sparse form of a SpinModelSpec on the matter configurations it admits.
struct SpinModel {
  std::vector<std::uint32_t> configs;  // bit i-1 set means spin up on site i
  SparseOp H;
  RVec electric;  // mean of (E + alpha) over links
};

SpinModel build_spin_model(const SpinModelSpec& spec, std::size_t cap = kDimensionCap);

}  // namespace lqed
