#include "lqed/driven.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "lqed/models.hpp"

namespace lqed {

int SidebandTerm::degree() const {
  int d = 0;
  for (int a : create) d += a;
  for (int b : annihilate) d += b;
  return d;
}

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

cplx ipow(int k) {
  static const cplx p[4] = {1.0, cplx(0, 1), -1.0, cplx(0, -1)};
  return p[k % 4];
}

}  // namespace

std::vector<SidebandTerm> sideband_expansion(const Beam& beam, const std::vector<double>& eps, int order) {
  if (order < 0 || order > 3) throw SchemaError("sideband expansion order must be 0..3");
  const int Q = static_cast<int>(beam.kappa.size());
  if (static_cast<int>(eps.size()) != Q) throw SchemaError("mode count mismatch in sideband expansion");
  double S = 0.0;
  for (double k : beam.kappa) S += k * k;
  std::vector<SidebandTerm> out;
  std::vector<int> a(Q, 0), b(Q, 0);
  // Taylor factor of exp(-S/2) up to the remaining power budget
  auto debye_waller = [&](int budget) {
    double acc = 0.0, term = 1.0;
    for (int k = 0; 2 * k <= budget; ++k) {
      acc += term;
      term *= -0.5 * S / (k + 1);
    }
    return acc;
  };
  std::function<void(int, int)> rec = [&](int slot, int used) {
    if (slot == 2 * Q) {
      cplx c = 0.5 * beam.Omega * ipow(used) * debye_waller(order - used);
      double freq = beam.detuning;
      for (int q = 0; q < Q; ++q) {
        c *= std::pow(beam.kappa[q], a[q] + b[q]) / (factorial(a[q]) * factorial(b[q]));
        freq -= eps[q] * (a[q] - b[q]);
      }
      if (c == 0.0 && used > 0) return;
      out.push_back({beam.ion, a, b, c, freq});
      return;
    }
    auto& v = slot < Q ? a[slot] : b[slot - Q];
    for (int k = 0; used + k <= order; ++k) {
      v = k;
      rec(slot + 1, used + k);
    }
    v = 0;
  };
  rec(0, 0);
  return out;
}

namespace {
constexpr double kValidityWarn = 0.5;
}

double CouplingValidity::worst() const { return std::max({r1, r2, r3, r4}); }

EffectiveCoupling effective_coupling(cplx f, cplx g, double theta, double delta, double d_eps, double N) {
  if (delta == 0.0 || delta + d_eps == 0.0) throw SchemaError("effective coupling is singular at resonance");
  if (N < 0) throw SchemaError("N must be non-negative");
  const double c = std::cos(theta), s = std::sin(theta);
  EffectiveCoupling r;
  r.J = std::sqrt(N) * f * std::conj(g) * c * c * s * (1.0 / (4 * delta) - 1.0 / (2 * (delta + d_eps)));
  const double side = std::min(std::abs(delta + d_eps), std::abs(delta - d_eps));
  r.validity.r1 = std::abs(f) * std::sqrt(N) * std::abs(s) / (2 * std::abs(delta));
  r.validity.r2 = std::abs(g) * std::abs(c) / (2 * std::abs(delta));
  r.validity.r3 = std::abs(f) * N / (2 * side);
  r.validity.r4 = std::abs(g) * std::sqrt(N) * std::abs(s) / (2 * side);
  if (r.validity.worst() > kValidityWarn)
    spdlog::warn("effective coupling outside its validity range (worst ratio {:.3f})", r.validity.worst());
  return r;
}

StandingWave standing_wave_nonlinearity(double Omega_sw, double Delta_sw, double eta, double theta) {
  if (Delta_sw == 0.0) throw SchemaError("standing-wave detuning must be nonzero");
  const double c2 = std::cos(theta) * std::cos(theta);
  const double e2 = eta * eta;
  StandingWave w;
  w.alpha = 1 - e2 + e2 * e2;
  w.beta = -2 * e2 * (1 + e2) * c2;
  w.gamma = 2 * e2 * e2 * c2 * c2;
  w.V = w.gamma * Omega_sw * Omega_sw / (4 * Delta_sw);
  return w;
}

void IonShift::add(const IonShift& o, double w) {
  a0 += w * o.a0;
  a1 += w * o.a1;
  a2 += w * o.a2;
  a_ph += w * o.a_ph;
}

namespace {

// Shifts of ion 1 of an element driven with strength Omega at offset delta.
void ion1_shifts(std::vector<ShiftContribution>& out, const ElementParams& p, double Omega, double delta,
                 const std::string& tag) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const double f2 = std::pow(Omega * p.eta * p.eta, 2);
  const double de = p.d_eps();
  const double of = Omega * Omega * p.eta * p.eta;  // Re(Omega* f)
  const double e1 = p.eps1, e2 = p.eps2;
  const double A = f2 * c * c * s * s / (8 * delta);
  const double B = f2 * std::pow(c, 4) / (4 * (delta + de));
  const double C = f2 * std::pow(s, 4) / (8 * (delta - de));
  const double F1 = of * c * c * (delta + e2 + e1) / (4 * (delta + e2) * (delta + e2 + 2 * e1));
  const double F2 = of * s * s * (delta + e1 + e2) / (4 * (delta + e1) * (delta + e1 + 2 * e2));
  const double F3 = Omega * Omega / (4 * (delta + e1 + e2));
  out.push_back({tag + " near, mixed second sideband", 0, {-A, -A, 0, A}});
  out.push_back({tag + " near, gauge second sideband", 0, {-B, -B, -B, 2 * B}});
  out.push_back({tag + " near, bus second sideband", 0, {-C, 0, 0, 0}});
  out.push_back({tag + " far, gauge first sideband", 0, {-F1 / 2, -F1, 0, 0}});
  out.push_back({tag + " far, bus first sideband", 0, {-F2, 0, 0, 0}});
  out.push_back({tag + " far, carrier", 0, {-F3, 0, 0, 0}});
}

void ion2_shifts(std::vector<ShiftContribution>& out, const ElementParams& p, double Omega, double delta,
                 const std::string& tag) {
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const double g2 = std::pow(Omega * p.eta, 2);
  const double de = p.d_eps();
  const double e1 = p.eps1, e2 = p.eps2;
  const double D = g2 * s * s / (4 * (delta + de));
  const double Ee = g2 * c * c / (8 * delta);
  const double H1 = g2 * s * s / (4 * (delta + e2 + e1));
  const double H2 = g2 * c * c / (8 * (delta + 2 * e2));
  // carrier denominator as printed for this ion
  const double H3 = Omega * Omega / (4 * (delta + e1));
  out.push_back({tag + " near, gauge first sideband", 1, {-D / 2, -D, 0, 0}});
  out.push_back({tag + " near, bus first sideband", 1, {-Ee, 0, 0, 0}});
  out.push_back({tag + " far, gauge first sideband", 1, {-H1 / 2, -H1, 0, 0}});
  out.push_back({tag + " far, bus first sideband", 1, {-H2, 0, 0, 0}});
  out.push_back({tag + " far, carrier", 1, {-H3, 0, 0, 0}});
}

}  // namespace

ShiftCatalog ac_stark_catalog_hobm(const ElementParams& p, const CompensationParams& comp) {
  ShiftCatalog cat;
  const double de = p.d_eps();
  if (p.Omega1 != 0.0) ion1_shifts(cat.parts, p, p.Omega1, p.delta, "drive");
  if (p.Omega2 != 0.0) ion2_shifts(cat.parts, p, p.Omega2, p.delta, "drive");
  if (comp.enabled && (p.Omega1 != 0.0 || p.Omega2 != 0.0)) {
    if (comp.mismatch < 0.0 || comp.mismatch > 1.0) throw SchemaError("mismatch fraction must lie in [0, 1]");
    const double w1 = -p.Omega1 * p.Omega1 * (comp.delta1 + de) / (p.delta + de);
    const double w2 = -p.Omega2 * p.Omega2 * (comp.delta2 + de) / (p.delta + de);
    if (w1 < 0.0 || w2 < 0.0)
      throw SchemaError("compensation matching needs delta' + d_eps and delta'' + d_eps opposite in sign to delta + d_eps");
    cat.Omega_c[0] = std::sqrt(w1 * (1.0 - comp.mismatch));
    cat.Omega_c[1] = std::sqrt(w2 * (1.0 - comp.mismatch));
    if (cat.Omega_c[0] > 0.0) ion1_shifts(cat.parts, p, cat.Omega_c[0], comp.delta1, "compensation");
    if (cat.Omega_c[1] > 0.0) ion2_shifts(cat.parts, p, cat.Omega_c[1], comp.delta2, "compensation");
  }
  for (const auto& c : cat.parts) cat.total[c.ion].add(c.shift);
  for (int i = 0; i < 2; ++i) {
    const auto& t = cat.total[i];
    const double N = p.N;
    cat.E[i] = t.a0 + t.a1 * N + t.a2 * N * N;
    cat.F[i] = t.a1 + 2 * t.a2 * N;
    cat.G[i] = t.a2;
    if (comp.enabled && comp.absorb_constant) {
      cat.E_absorbed[i] = cat.E[i];
      cat.E[i] = 0.0;
    }
  }
  return cat;
}

RVec hobm_shift_diagonal(const Basis& basis, const ShiftCatalog& cat, double unit) {
  const auto& lat = basis.lattice();
  if (lat.link.kind != LinkKind::boson) throw SchemaError("HOBM simulator needs boson links");
  if (!(unit > 0.0)) throw SchemaError("energy unit must be positive");
  const auto n = static_cast<Eigen::Index>(basis.size());
  RVec d = RVec::Zero(n);
  if (cat.empty()) return d;
  for (Eigen::Index r = 0; r < n; ++r) {
    const BasisState s = basis.state(static_cast<std::size_t>(r));
    double acc = 0.0;
    for (int l = 0; l < lat.num_links(); ++l) {
      const double x = lat.field_of(s.links[l]);  // n_l - N
      for (int role = 0; role < 2; ++role) {
        const int site = l + role;
        const double sz = s.matter[site] ? 1.0 : -1.0;
        acc += (cat.E[role] + cat.F[role] * x + cat.G[role] * x * x) * sz;
      }
    }
    d[r] = acc / unit;
  }
  return d;
}

SparseOp build_hobm_simulator(const Basis& basis, const ModelParams& p, const ShiftCatalog& cat, double unit) {
  SparseOp H = build_hobm(basis, p);
  const RVec d = hobm_shift_diagonal(basis, cat, unit);
  if (d.cwiseAbs().maxCoeff() == 0.0) return H;
  SparseOp D(H.rows(), H.cols());
  std::vector<Eigen::Triplet<cplx>> t;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] != 0.0) t.emplace_back(i, i, d[i]);
  D.setFromTriplets(t.begin(), t.end());
  SparseOp out = H + D;
  out.prune(cplx(0.0));
  return out;
}

double TwoIonCheck::relative_error() const {
  return std::abs(J_bruteforce - J_formula) / std::max(std::abs(J_formula), 1e-300);
}

TwoIonCheck two_ion_bruteforce(const ElementParams& p, int nmax1, int nmax2, SidebandWeights weights) {
  if (nmax1 < p.N + 2 || nmax2 < 2) throw SchemaError("phonon cutoffs too small for the two-ion check");
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const double de = p.d_eps();
  // near-resonant part of the expansion for each ion
  const std::vector<double> eps{p.eps1, p.eps2};
  Beam b1{0, p.Omega1, p.eps1 + p.eps2 + p.delta, {p.eta * c, p.eta * s}};
  Beam b2{1, p.Omega2, p.eps2 + p.delta, {-p.eta * s, p.eta * c}};
  std::vector<SidebandTerm> terms;
  for (const auto& t : sideband_expansion(b1, eps, 2))
    if (t.degree() == 2 && t.annihilate[0] == 0 && t.annihilate[1] == 0) {
      terms.push_back(t);
      const bool pure = t.create[0] == 2 || t.create[1] == 2;
      if (pure && weights == SidebandWeights::printed) terms.back().coef *= 2.0;
    }
  for (const auto& t : sideband_expansion(b2, eps, 2))
    if (t.degree() == 1 && t.annihilate[0] == 0 && t.annihilate[1] == 0) terms.push_back(t);
  // static frame: K = s1 Pe1 + s2 Pe2 + p1 n1 + p2 n2 with p2 = 0, mu = 0
  const double p1 = de, p2 = 0.0, s1 = p.delta - de, s2 = p.delta;
  const int d1 = nmax1 + 1, d2 = nmax2 + 1;
  const int dim = 4 * d1 * d2;
  auto index = [&](int e1, int e2, int n1, int n2) { return ((e1 * 2 + e2) * d1 + n1) * d2 + n2; };
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
  for (int e1 = 0; e1 < 2; ++e1)
    for (int e2 = 0; e2 < 2; ++e2)
      for (int n1 = 0; n1 < d1; ++n1)
        for (int n2 = 0; n2 < d2; ++n2) {
          const int i = index(e1, e2, n1, n2);
          H(i, i) = -(s1 * e1 + s2 * e2 + p1 * n1 + p2 * n2);
          for (const auto& t : terms) {
            const int e = t.ion == 0 ? e1 : e2;
            if (e != 0) continue;
            const int m1 = n1 + t.create[0], m2 = n2 + t.create[1];
            if (m1 >= d1 || m2 >= d2) continue;
            double amp = 1.0;
            for (int k = n1 + 1; k <= m1; ++k) amp *= std::sqrt(double(k));
            for (int k = n2 + 1; k <= m2; ++k) amp *= std::sqrt(double(k));
            const int j = t.ion == 0 ? index(1, e2, m1, m2) : index(e1, 1, m1, m2);
            H(j, i) += t.coef * amp;
            H(i, j) += std::conj(t.coef * amp);
          }
        }
  // model space: |g e, N-1, 0> and |e g, N, 0>
  const int N = static_cast<int>(std::lround(p.N));
  const int ia = index(0, 1, N - 1, 0), ib = index(1, 0, N, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const auto& U = es.eigenvectors();
  std::vector<std::pair<double, int>> weight;
  for (int k = 0; k < dim; ++k) weight.emplace_back(std::norm(U(ia, k)) + std::norm(U(ib, k)), k);
  std::partial_sort(weight.begin(), weight.begin() + 2, weight.end(), std::greater<>());
  // des Cloizeaux effective Hamiltonian on the projected, Loewdin-orthonormalized pair
  Eigen::Matrix2cd P;  // columns: projections of the two dressed states
  Eigen::Vector2d lam;
  for (int k = 0; k < 2; ++k) {
    const int col = weight[k].second;
    P(0, k) = U(ia, col);
    P(1, k) = U(ib, col);
    lam[k] = es.eigenvalues()[col];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> so(P.adjoint() * P);
  const Eigen::Matrix2cd inv_sqrt =
      so.eigenvectors() * so.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * so.eigenvectors().adjoint();
  const Eigen::Matrix2cd Pt = P * inv_sqrt;
  const Eigen::Matrix2cd Heff = Pt * lam.cast<cplx>().asDiagonal() * Pt.adjoint();
  TwoIonCheck r;
  r.J_bruteforce = std::abs(Heff(1, 0));
  r.J_formula = std::abs(effective_coupling(p.f(), p.g(), p.theta, p.delta, de, p.N).J);
  r.J_lamb_dicke = std::abs(std::sqrt(p.N) * p.f() * std::conj(p.g()) * c * c * s *
                            (1.0 / (4.0 * p.delta) - 1.0 / (4.0 * (p.delta + de))));
  return r;
}

}  // namespace lqed
