#include "lqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace lqed {

int LatticeSpec::link_low() const {
  switch (link.kind) {
    case LinkKind::rotor: return -link.lambda;
    case LinkKind::boson: return link.n_min;
    case LinkKind::spin_half: return 0;
  }
  return 0;
}

int LatticeSpec::link_high() const {
  switch (link.kind) {
    case LinkKind::rotor: return link.lambda;
    case LinkKind::boson: return link.n_max;
    case LinkKind::spin_half: return 1;
  }
  return 0;
}

double LatticeSpec::field_of(int stored) const {
  switch (link.kind) {
    case LinkKind::rotor: return stored;
    case LinkKind::boson: return stored - link.offset;
    case LinkKind::spin_half: return stored - 0.5;
  }
  return 0.0;
}

void LatticeSpec::validate() const {
  if (L < 2) throw SchemaError(fmt::format("lattice needs L >= 2, got {}", L));
  if (matter_max < 1) throw SchemaError("matter_max must be >= 1");
  switch (link.kind) {
    case LinkKind::rotor:
      if (link.lambda < 0) throw SchemaError("rotor cutoff must be non-negative");
      if (matter != MatterKind::spin) throw SchemaError("rotor links need spin matter");
      break;
    case LinkKind::boson:
      if (link.offset < 1) throw SchemaError("boson offset N must be positive");
      if (link.n_min < 0 || link.n_min > link.n_max)
        throw SchemaError(fmt::format("bad boson window [{}, {}]", link.n_min, link.n_max));
      if (matter != MatterKind::spin) throw SchemaError("boson links need spin matter");
      break;
    case LinkKind::spin_half:
      if (boundary != Boundary::periodic)
        throw SchemaError("spin-1/2 links are only supported with periodic boundary");
      break;
  }
  if (matter == MatterKind::spin && matter_max != 1) throw SchemaError("spin matter has matter_max = 1");
}

int default_rotor_cutoff(int L, double alpha) {
  return 1 + (L + 3) / 4 + static_cast<int>(std::ceil(std::abs(alpha * L) - 1e-12));
}

int default_boson_window(int L) { return 1 + (L + 3) / 4; }

LatticeSpec qed_lattice(int L, std::optional<int> lambda, double alpha) {
  LatticeSpec lat;
  lat.L = L;
  lat.link.kind = LinkKind::rotor;
  lat.link.lambda = lambda.value_or(default_rotor_cutoff(L, alpha));
  lat.alpha = alpha;
  lat.validate();
  return lat;
}

LatticeSpec hobm_lattice(int L, int N, std::optional<int> window, double alpha) {
  LatticeSpec lat;
  lat.L = L;
  lat.link.kind = LinkKind::boson;
  lat.link.offset = N;
  const int w = window.value_or(default_boson_window(L));
  lat.link.n_min = std::max(0, N - w);
  lat.link.n_max = N + w;
  lat.alpha = alpha;
  lat.validate();
  return lat;
}

LatticeSpec qlm_lattice(int L, MatterKind matter, int matter_max) {
  LatticeSpec lat;
  lat.L = L;
  lat.boundary = Boundary::periodic;
  lat.link.kind = LinkKind::spin_half;
  lat.matter = matter;
  lat.matter_max = matter == MatterKind::spin ? 1 : matter_max;
  lat.validate();
  return lat;
}

namespace {

struct Radices {
  std::uint64_t matter;
  std::uint64_t link;
};

Radices radices(const LatticeSpec& lat) {
  return {static_cast<std::uint64_t>(lat.matter_max + 1),
          static_cast<std::uint64_t>(lat.link_high() - lat.link_low() + 1)};
}

long double tensor_size(const LatticeSpec& lat) {
  auto r = radices(lat);
  return std::pow(static_cast<long double>(r.matter), lat.L) *
         std::pow(static_cast<long double>(r.link), lat.num_links());
}

void check_key_space(const LatticeSpec& lat) {
  if (tensor_size(lat) >= 9.2e18L)
    throw CapacityError("state keys do not fit in 64 bits for this lattice");
}

}  // namespace

std::uint64_t encode(const LatticeSpec& lat, const BasisState& s) {
  auto r = radices(lat);
  std::uint64_t key = 0;
  for (int m : s.matter) key = key * r.matter + static_cast<std::uint64_t>(m);
  for (int v : s.links) key = key * r.link + static_cast<std::uint64_t>(v - lat.link_low());
  return key;
}

BasisState decode(const LatticeSpec& lat, std::uint64_t key) {
  auto r = radices(lat);
  BasisState s;
  s.matter.resize(lat.L);
  s.links.resize(lat.num_links());
  for (int k = lat.num_links() - 1; k >= 0; --k) {
    s.links[k] = static_cast<int>(key % r.link) + lat.link_low();
    key /= r.link;
  }
  for (int k = lat.L - 1; k >= 0; --k) {
    s.matter[k] = static_cast<int>(key % r.matter);
    key /= r.matter;
  }
  return s;
}

Basis::Basis(LatticeSpec lat, std::vector<std::uint64_t> keys, bool projected)
    : lat_(std::move(lat)), keys_(std::move(keys)), projected_(projected) {}

std::optional<std::size_t> Basis::find(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys_.begin());
}

std::optional<std::size_t> Basis::find(const BasisState& s) const {
  for (int v : s.links)
    if (v < lat_.link_low() || v > lat_.link_high()) return std::nullopt;
  for (int m : s.matter)
    if (m < 0 || m > lat_.matter_max) return std::nullopt;
  return find(encode(lat_, s));
}

int staggered_charge(int site, int spin_up) {
  const int tz = spin_up ? 1 : -1;
  const int stag = (site % 2 == 0) ? 1 : -1;
  return (tz + stag) / 2;
}

std::vector<int> charges(const LatticeSpec& lat, const BasisState& s) {
  std::vector<int> q(lat.L);
  const bool qlm = lat.link.kind == LinkKind::spin_half;
  for (int i = 0; i < lat.L; ++i) q[i] = qlm ? s.matter[i] : staggered_charge(i + 1, s.matter[i]);
  return q;
}

int total_charge(const LatticeSpec& lat, const BasisState& s) {
  int t = 0;
  for (int q : charges(lat, s)) t += q;
  return t;
}

std::vector<double> gauss_values(const LatticeSpec& lat, const BasisState& s) {
  const int L = lat.L;
  const auto q = charges(lat, s);
  std::vector<double> g(lat.num_constrained_sites());
  auto left_field = [&](int i) -> double {  // field on link (i-1, i), site i 1-based
    if (i > 1) return lat.field_of(s.links[i - 2]);
    if (lat.boundary == Boundary::periodic) return lat.field_of(s.links[L - 1]);
    return 0.0;
  };
  for (int i = 1; i <= static_cast<int>(g.size()); ++i) {
    const double right = lat.field_of(s.links[i - 1]);
    if (lat.link.kind == LinkKind::spin_half)
      g[i - 1] = q[i - 1] + right + left_field(i);
    else
      g[i - 1] = q[i - 1] - (right - left_field(i));
  }
  return g;
}

namespace {

void push_checked(std::vector<std::uint64_t>& keys, std::uint64_t key, std::size_t cap) {
  if (keys.size() >= cap)
    throw CapacityError(fmt::format("gauge sector exceeds dimension cap {}", cap));
  keys.push_back(key);
}

bool charge_ok(const LatticeSpec& lat, const BasisState& s) {
  return !lat.total_charge || total_charge(lat, s) == *lat.total_charge;
}

}  // namespace

Basis enumerate_gauge_sector(const LatticeSpec& lat, std::size_t cap) {
  lat.validate();
  check_key_space(lat);
  const int L = lat.L;
  const int nl = lat.num_links();
  std::vector<std::uint64_t> keys;
  BasisState s;
  s.matter.assign(L, 0);
  s.links.assign(nl, 0);

  if (lat.link.kind == LinkKind::spin_half) {
    if (L > 30) throw CapacityError("spin-link enumeration limited to L <= 30");
    for (std::uint64_t bits = 0; bits < (1ULL << L); ++bits) {
      for (int k = 0; k < L; ++k) s.links[k] = static_cast<int>((bits >> k) & 1ULL);
      bool ok = true;
      for (int i = 1; i <= L && ok; ++i) {
        const double sr = lat.field_of(s.links[i - 1]);
        const double sl = lat.field_of(s.links[(i - 2 + L) % L]);
        const double n = -(sr + sl);
        const int ni = static_cast<int>(std::lround(n));
        if (ni < 0 || ni > lat.matter_max) ok = false;
        else s.matter[i - 1] = ni;
      }
      if (ok && charge_ok(lat, s)) push_checked(keys, encode(lat, s), cap);
    }
  } else {
    if (L > 40) throw CapacityError("matter enumeration limited to L <= 40");
    // Each matter configuration fixes the links by telescoping from the left
    // edge (open) or from the wrap-around link value (periodic).
    std::vector<int> seeds;
    if (lat.boundary == Boundary::open) seeds.push_back(0);
    else
      for (int v = lat.link_low(); v <= lat.link_high(); ++v) seeds.push_back(v);
    const int off = lat.link.kind == LinkKind::boson ? lat.link.offset : 0;
    for (std::uint64_t bits = 0; bits < (1ULL << L); ++bits) {
      for (int i = 0; i < L; ++i) s.matter[i] = static_cast<int>((bits >> i) & 1ULL);
      if (!charge_ok(lat, s)) continue;
      for (int seed : seeds) {
        int E = lat.boundary == Boundary::open ? 0 : seed - off;
        bool ok = true;
        for (int k = 0; k < L - 1 && ok; ++k) {
          E += staggered_charge(k + 1, s.matter[k]);
          const int stored = E + off;
          if (stored < lat.link_low() || stored > lat.link_high()) ok = false;
          else s.links[k] = stored;
        }
        if (!ok) continue;
        if (lat.boundary == Boundary::periodic) {
          s.links[L - 1] = seed;
          // Gauss law at site L closes the ring.
          if (E + staggered_charge(L, s.matter[L - 1]) != seed - off) continue;
        }
        push_checked(keys, encode(lat, s), cap);
      }
    }
  }
  std::sort(keys.begin(), keys.end());
  return Basis(lat, std::move(keys), true);
}

Basis enumerate_tensor_basis(const LatticeSpec& lat, std::size_t cap) {
  lat.validate();
  const long double n = tensor_size(lat);
  if (n > static_cast<long double>(cap))
    throw CapacityError(fmt::format("tensor space of {:.3Le} states exceeds cap {}", n, cap));
  std::vector<std::uint64_t> keys(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < keys.size(); ++i) keys[i] = i;
  return Basis(lat, std::move(keys), false);
}

std::vector<double> gauss_violation(const Basis& basis, const Vec& psi) {
  const auto& lat = basis.lattice();
  std::vector<double> out(lat.num_constrained_sites(), 0.0);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double p = std::norm(psi[static_cast<Eigen::Index>(k)]);
    if (p == 0.0) continue;
    const auto g = gauss_values(lat, basis.state(k));
    for (std::size_t i = 0; i < g.size(); ++i) out[i] += p * g[i] * g[i];
  }
  return out;
}

double SpinModelSpec::hop_modifier(int e_new) const {
  if (e_new < e_min || e_new > e_max) return 0.0;
  if (kind == LinkKind::boson) return std::sqrt(static_cast<double>(offset + e_new) / offset);
  return 1.0;
}

SpinModelSpec eliminate_gauge_field(const LatticeSpec& lat, const ModelParams& p) {
  lat.validate();
  if (lat.boundary != Boundary::open || lat.link.kind == LinkKind::spin_half)
    throw SchemaError("gauge elimination needs open boundary and rotor or boson links");
  const int L = lat.L;
  SpinModelSpec m;
  m.L = L;
  m.J = p.J;
  m.kind = lat.link.kind;
  m.alpha = lat.alpha;
  m.total_charge = lat.total_charge;
  if (lat.link.kind == LinkKind::boson) {
    m.offset = lat.link.offset;
    m.e_min = lat.link.n_min - lat.link.offset;
    m.e_max = lat.link.n_max - lat.link.offset;
  } else {
    m.e_min = -lat.link.lambda;
    m.e_max = lat.link.lambda;
  }
  m.field = RVec::Zero(L);
  m.coupling = Eigen::MatrixXd::Zero(L, L);

  // Partial sums of the staggering signs s_j = (-1)^j.
  std::vector<double> S(L + 1, 0.0);
  for (int j = 1; j <= L; ++j) S[j] = S[j - 1] + ((j % 2 == 0) ? 1.0 : -1.0);

  const double a = lat.alpha;
  for (int l = 1; l <= L - 1; ++l) {
    m.constant += p.V * (l / 4.0 + S[l] * S[l] / 4.0 + a * S[l] + a * a);
    for (int j = 1; j <= l; ++j) m.field[j - 1] += p.V * (0.5 * S[l] + a);
  }
  for (int k = 2; k <= L; ++k)
    for (int j = 1; j < k; ++j) m.coupling(j - 1, k - 1) = 0.5 * p.V * (L - k);
  for (int j = 1; j <= L; ++j) {
    const double s = (j % 2 == 0) ? 1.0 : -1.0;
    m.field[j - 1] += 0.5 * p.mu * s;
  }
  m.constant += 0.5 * p.mu * L;
  return m;
}

SpinModel build_spin_model(const SpinModelSpec& spec, std::size_t cap) {
  const int L = spec.L;
  if (L > 30 || (1ULL << L) > cap) throw CapacityError("eliminated model exceeds dimension cap");
  SpinModel out;
  std::vector<std::vector<int>> fields;
  for (std::uint32_t bits = 0; bits < (1U << L); ++bits) {
    int E = 0, Q = 0;
    bool ok = true;
    std::vector<int> f(L - 1);
    for (int i = 1; i <= L; ++i) {
      const int q = staggered_charge(i, (bits >> (i - 1)) & 1U);
      Q += q;
      if (i < L) {
        E += q;
        if (E < spec.e_min || E > spec.e_max) ok = false;
        f[i - 1] = E;
      }
    }
    if (!ok || (spec.total_charge && Q != *spec.total_charge)) continue;
    out.configs.push_back(bits);
    fields.push_back(std::move(f));
  }
  const auto n = static_cast<Eigen::Index>(out.configs.size());
  out.electric.resize(n);
  std::vector<Eigen::Triplet<cplx>> trip;
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::uint32_t bits = out.configs[r];
    auto tz = [&](int j) { return ((bits >> j) & 1U) ? 1.0 : -1.0; };
    double d = spec.constant;
    for (int j = 0; j < L; ++j) d += spec.field[j] * tz(j);
    for (int k = 1; k < L; ++k)
      for (int j = 0; j < k; ++j) d += spec.coupling(j, k) * tz(j) * tz(k);
    trip.emplace_back(r, r, d);
    double esum = 0.0;
    for (int e : fields[r]) esum += e + spec.alpha;
    out.electric[r] = esum / (L - 1);
    for (int i = 0; i < L - 1; ++i) {
      const bool down_i = !((bits >> i) & 1U);
      const bool up_next = (bits >> (i + 1)) & 1U;
      if (!(down_i && up_next)) continue;
      const double mod = spec.hop_modifier(fields[r][i] + 1);
      if (mod == 0.0) continue;
      const std::uint32_t t = (bits | (1U << i)) & ~(1U << (i + 1));
      auto it = std::lower_bound(out.configs.begin(), out.configs.end(), t);
      if (it == out.configs.end() || *it != t) continue;
      const auto c = static_cast<Eigen::Index>(it - out.configs.begin());
      trip.emplace_back(c, r, -spec.J * mod);
      trip.emplace_back(r, c, -spec.J * mod);
    }
  }
  out.H.resize(n, n);
  out.H.setFromTriplets(trip.begin(), trip.end());
  return out;
}

}  // namespace lqed
