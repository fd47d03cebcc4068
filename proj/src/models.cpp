#include "lqed/models.hpp"

#include <cmath>
#include <deque>
#include <unordered_set>
#include <fmt/format.h>

namespace lqed {

namespace {

bool is_qlm(ModelFamily f) { return f == ModelFamily::qlm_spin || f == ModelFamily::qlm_boson; }

void check_family(ModelFamily f, const LatticeSpec& lat) {
  switch (f) {
    case ModelFamily::qed:
      if (lat.link.kind != LinkKind::rotor) throw SchemaError("QED needs rotor links");
      break;
    case ModelFamily::hobm:
      if (lat.link.kind != LinkKind::boson) throw SchemaError("HOBM needs boson links");
      break;
    case ModelFamily::qlm_spin:
      if (lat.link.kind != LinkKind::spin_half || lat.matter != MatterKind::spin)
        throw SchemaError("spin-form QLM needs spin-1/2 links and spin matter");
      break;
    case ModelFamily::qlm_boson:
      if (lat.link.kind != LinkKind::spin_half || lat.matter != MatterKind::boson)
        throw SchemaError("bosonic QLM needs spin-1/2 links and boson matter");
      break;
  }
  if (!is_qlm(f) && lat.boundary != Boundary::open)
    throw SchemaError("QED and HOBM builders use open boundary");
}

}  // namespace

double model_diagonal(ModelFamily f, const LatticeSpec& lat, const BasisState& s, const ModelParams& p) {
  double d = 0.0;
  if (is_qlm(f)) {
    for (int n : s.matter) d += p.mu * n;
    return d;
  }
  for (int i = 0; i < lat.L; ++i) d += p.mu * std::abs(staggered_charge(i + 1, s.matter[i]));
  for (int v : s.links) {
    const double e = lat.field_of(v) + lat.alpha;
    d += p.V * e * e;
  }
  return d;
}

void model_connections(ModelFamily f, const LatticeSpec& lat, const BasisState& s, const ModelParams& p,
                       std::vector<Connection>& out) {
  out.clear();
  const int L = lat.L;
  const int lo = lat.link_low(), hi = lat.link_high();
  for (int k = 0; k < lat.num_links(); ++k) {
    const int a = k, b = (k + 1) % L;
    if (is_qlm(f)) {
      const int na = s.matter[a], nb = s.matter[b];
      // c_a s+ c_b lowers both matter sites and raises the link.
      if (s.links[k] == 0 && na >= 1 && nb >= 1) {
        BasisState t = s;
        t.matter[a] -= 1;
        t.matter[b] -= 1;
        t.links[k] = 1;
        const double amp = f == ModelFamily::qlm_boson ? std::sqrt(double(na) * nb) : 1.0;
        out.push_back({std::move(t), -p.J * amp});
      }
      if (s.links[k] == 1 && na < lat.matter_max && nb < lat.matter_max) {
        BasisState t = s;
        t.matter[a] += 1;
        t.matter[b] += 1;
        t.links[k] = 0;
        const double amp = f == ModelFamily::qlm_boson ? std::sqrt(double(na + 1) * (nb + 1)) : 1.0;
        out.push_back({std::move(t), -p.J * amp});
      }
      continue;
    }
    const double scale = f == ModelFamily::hobm ? 1.0 / std::sqrt(double(lat.link.offset)) : 1.0;
    const int v = s.links[k];
    // tau+_a U tau-_b
    if (s.matter[a] == 0 && s.matter[b] == 1 && v < hi) {
      BasisState t = s;
      t.matter[a] = 1;
      t.matter[b] = 0;
      t.links[k] = v + 1;
      const double amp = f == ModelFamily::hobm ? std::sqrt(double(v + 1)) : 1.0;
      out.push_back({std::move(t), -p.J * scale * amp});
    }
    if (s.matter[a] == 1 && s.matter[b] == 0 && v > lo) {
      BasisState t = s;
      t.matter[a] = 0;
      t.matter[b] = 1;
      t.links[k] = v - 1;
      const double amp = f == ModelFamily::hobm ? std::sqrt(double(v)) : 1.0;
      out.push_back({std::move(t), -p.J * scale * amp});
    }
  }
}

SparseOp build_model(ModelFamily f, const Basis& basis, const ModelParams& p) {
  const auto& lat = basis.lattice();
  check_family(f, lat);
  const auto n = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::Triplet<cplx>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 4);
  std::vector<Connection> conn;
  for (Eigen::Index r = 0; r < n; ++r) {
    const BasisState s = basis.state(static_cast<std::size_t>(r));
    const double d = model_diagonal(f, lat, s, p);
    if (d != 0.0) trip.emplace_back(r, r, d);
    model_connections(f, lat, s, p, conn);
    for (const auto& c : conn) {
      auto idx = basis.find(c.target);
      if (!idx) continue;
      // Each move is generated from its source, so this fills column r.
      trip.emplace_back(static_cast<Eigen::Index>(*idx), r, c.amplitude);
    }
  }
  SparseOp H(n, n);
  H.setFromTriplets(trip.begin(), trip.end());
  return H;
}

SparseOp build_qed(const Basis& basis, const ModelParams& p) { return build_model(ModelFamily::qed, basis, p); }
SparseOp build_hobm(const Basis& basis, const ModelParams& p) { return build_model(ModelFamily::hobm, basis, p); }
SparseOp build_qlm(const Basis& basis, const ModelParams& p, ModelFamily form) {
  if (!is_qlm(form)) throw SchemaError("build_qlm needs a QLM form");
  return build_model(form, basis, p);
}

Basis closure_basis(ModelFamily f, const LatticeSpec& lat, const ModelParams& p,
                    const std::vector<BasisState>& seeds, std::size_t cap) {
  check_family(f, lat);
  std::unordered_set<std::uint64_t> seen;
  std::deque<BasisState> queue;
  for (const auto& s : seeds)
    if (seen.insert(encode(lat, s)).second) queue.push_back(s);
  std::vector<Connection> conn;
  while (!queue.empty()) {
    BasisState s = std::move(queue.front());
    queue.pop_front();
    model_connections(f, lat, s, p, conn);
    for (auto& c : conn) {
      if (seen.insert(encode(lat, c.target)).second) {
        if (seen.size() > cap) throw CapacityError("closure basis exceeds dimension cap");
        queue.push_back(std::move(c.target));
      }
    }
  }
  std::vector<std::uint64_t> keys(seen.begin(), seen.end());
  std::sort(keys.begin(), keys.end());
  return Basis(lat, std::move(keys), false);
}

RVec electric_observable(const Basis& basis) {
  const auto& lat = basis.lattice();
  const auto n = static_cast<Eigen::Index>(basis.size());
  RVec d(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const BasisState s = basis.state(static_cast<std::size_t>(r));
    double acc = 0.0;
    if (lat.link.kind == LinkKind::spin_half) {
      // staggered sign on the Pauli value of the ion encoding each link
      for (int l = 1; l <= lat.num_links(); ++l) {
        const double sz = 2.0 * lat.field_of(s.links[l - 1]);
        acc += (l % 2 == 0 ? 1.0 : -1.0) * sz;
      }
    } else {
      for (int v : s.links) acc += lat.field_of(v) + lat.alpha;
    }
    d[r] = acc / lat.num_links();
  }
  return d;
}

double expectation(const RVec& diag, const Vec& psi) {
  return (psi.cwiseAbs2().array() * diag.array()).sum();
}

BasisState string_configuration(const LatticeSpec& lat) {
  if (lat.link.kind == LinkKind::spin_half || lat.boundary != Boundary::open)
    throw SchemaError("string state is defined for open QED/HOBM chains");
  if (lat.L % 2 != 0 || lat.L < 2) throw SchemaError("string state needs an even number of sites");
  BasisState s;
  s.matter.resize(lat.L);
  for (int i = 1; i <= lat.L; ++i) s.matter[i - 1] = (i % 2 == 1) ? 1 : 0;  // bare vacuum
  s.matter[0] = 0;
  s.matter[lat.L - 1] = 1;
  const int off = lat.link.kind == LinkKind::boson ? lat.link.offset : 0;
  s.links.assign(lat.num_links(), off - 1);
  return s;
}

BasisState two_meson_configuration(const LatticeSpec& lat) {
  BasisState s = string_configuration(lat);
  if (lat.L < 4) throw SchemaError("two-meson state needs L >= 4");
  s.matter[1] = 1;
  s.matter[lat.L - 2] = 0;
  const int off = lat.link.kind == LinkKind::boson ? lat.link.offset : 0;
  for (auto& v : s.links) v = off;
  s.links.front() = off - 1;
  s.links.back() = off - 1;
  return s;
}

BasisState false_vacuum_configuration(const LatticeSpec& lat) {
  if (lat.link.kind != LinkKind::spin_half) throw SchemaError("false vacuum is a QLM state");
  BasisState s;
  s.matter.assign(lat.L, 0);
  s.links.resize(lat.num_links());
  for (int l = 1; l <= lat.num_links(); ++l) s.links[l - 1] = (l % 2 == 1) ? 0 : 1;
  return s;
}

Vec product_state(const Basis& basis, const BasisState& s) {
  auto idx = basis.find(s);
  if (!idx) throw SchemaError("requested product state is not in the basis");
  Vec v = Vec::Zero(static_cast<Eigen::Index>(basis.size()));
  v[static_cast<Eigen::Index>(*idx)] = 1.0;
  return v;
}

Vec string_state(const Basis& basis) { return product_state(basis, string_configuration(basis.lattice())); }

double classical_energy(const std::vector<int>& q, const ModelParams& p, double alpha) {
  double e = 0.0, E = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    e += p.mu * std::abs(q[i]);
    if (i + 1 < q.size()) {
      E += q[i];
      e += p.V * (E + alpha) * (E + alpha);
    }
  }
  return e;
}

std::vector<int> string_charges(int L) {
  std::vector<int> q(L, 0);
  q.front() = -1;
  q.back() = 1;
  return q;
}

std::vector<int> two_meson_charges(int L) {
  if (L < 4) throw SchemaError("two-meson pattern needs L >= 4");
  std::vector<int> q(L, 0);
  q[0] = -1;
  q[1] = 1;
  q[L - 2] = -1;
  q[L - 1] = 1;
  return q;
}

int string_breaking_length(double mu, double V, int L_max) {
  if (!(V > 0.0) || mu < 0.0) throw SchemaError("string breaking needs V > 0 and mu >= 0");
  const ModelParams p{0.0, mu, V};
  for (int L = 4; L <= L_max; ++L) {
    const double es = classical_energy(string_charges(L), p);
    const double em = classical_energy(two_meson_charges(L), p);
    if (em <= es + 1e-12 * std::max(1.0, std::abs(es))) return L;
  }
  throw ConvergenceError("no string breaking below L_max", 0.0);
}

}  // namespace lqed
