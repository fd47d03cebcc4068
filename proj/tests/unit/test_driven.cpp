#include <doctest.h>

#include "lqed/driven.hpp"
#include "lqed/models.hpp"
#include "helpers.hpp"

using namespace lqed;

namespace {

const SidebandTerm* find_term(const std::vector<SidebandTerm>& ts, std::vector<int> a, std::vector<int> b) {
  for (const auto& t : ts)
    if (t.create == a && t.annihilate == b) return &t;
  return nullptr;
}

// Heavier-weight beams with every exponent scaled by s.
ElementParams scaled(double s) {
  ElementParams e;
  e.Omega1 *= s;
  e.Omega2 *= s;
  return e;
}

}  // namespace

TEST_CASE("carrier only at order zero") {
  const Beam b{0, 2.0, 0.3, {0.1, 0.05}};
  const auto ts = sideband_expansion(b, {1.0, 1.2}, 0);
  REQUIRE(ts.size() == 1);
  CHECK(ts[0].coef == cplx(1.0, 0.0));
  CHECK(ts[0].freq == 0.3);
  CHECK_THROWS_AS(sideband_expansion(b, {1.0, 1.2}, 4), SchemaError);
}

TEST_CASE("near-resonant sidebands of one element") {
  const ElementParams p;
  const double c = std::cos(p.theta), s = std::sin(p.theta);
  const std::vector<double> eps{p.eps1, p.eps2};
  const double de = p.d_eps();
  const Beam b1{0, p.Omega1, p.eps1 + p.eps2 + p.delta, {p.eta * c, p.eta * s}};
  const Beam b2{1, p.Omega2, p.eps2 + p.delta, {-p.eta * s, p.eta * c}};
  const auto t1 = sideband_expansion(b1, eps, 2);
  const auto t2 = sideband_expansion(b2, eps, 2);
  const cplx f = p.f(), g = p.g();
  const auto* mixed = find_term(t1, {1, 1}, {0, 0});
  const auto* gauge2 = find_term(t1, {2, 0}, {0, 0});
  const auto* bus2 = find_term(t1, {0, 2}, {0, 0});
  const auto* gauge1 = find_term(t2, {1, 0}, {0, 0});
  const auto* bus1 = find_term(t2, {0, 1}, {0, 0});
  REQUIRE((mixed && gauge2 && bus2 && gauge1 && bus1));
  const double tol = 1e-9 * std::abs(f);
  CHECK(std::abs(mixed->coef - (-0.5 * f * c * s)) < tol);
  // (i kappa)^2 / 2!: half the weight of the mixed term per unit kappa^2
  CHECK(std::abs(gauge2->coef - (-0.25 * f * c * c)) < tol);
  CHECK(std::abs(bus2->coef - (-0.25 * f * s * s)) < tol);
  CHECK(std::abs(gauge1->coef - (-0.5 * g * s)) < 1e-9 * std::abs(g));
  CHECK(std::abs(bus1->coef - (0.5 * g * c)) < 1e-9 * std::abs(g));
  CHECK(mixed->freq == doctest::Approx(p.delta));
  CHECK(gauge2->freq == doctest::Approx(p.delta + de));
  CHECK(bus2->freq == doctest::Approx(p.delta - de));
  CHECK(gauge1->freq == doctest::Approx(p.delta + de));
  CHECK(bus1->freq == doctest::Approx(p.delta));
}

TEST_CASE("sideband strengths of the element") {
  const ElementParams p;
  CHECK(std::abs(p.f()) / kTwoPi == doctest::Approx(1.2e3).epsilon(0.05));
  CHECK(std::abs(p.g()) / kTwoPi == doctest::Approx(17e3).epsilon(0.05));
}

TEST_CASE("effective tunnelling") {
  const double th = 0.25, d = -two_pi_hz(50e3), de = two_pi_hz(10e3);
  const cplx f = two_pi_hz(1.2e3), g(0, two_pi_hz(17e3));
  const auto r = effective_coupling(f, g, th, d, de, 10);
  CHECK(std::abs(r.J) / kTwoPi == doctest::Approx(120.0).epsilon(0.10));
  CHECK(r.validity.ok());
  CHECK(std::abs(effective_coupling(0.0, g, th, d, de, 10).J) == 0.0);
  const auto rc = effective_coupling(f, std::conj(g), th, d, de, 10);
  CHECK(std::arg(rc.J) == doctest::Approx(-std::arg(r.J)));
  CHECK_THROWS_AS(effective_coupling(f, g, th, 0.0, de, 10), SchemaError);
  CHECK_THROWS_AS(effective_coupling(f, g, th, -de, de, 10), SchemaError);
}

TEST_CASE("standing-wave nonlinearity") {
  const double O = two_pi_hz(1e9), D = two_pi_hz(1e12);
  const auto sw = standing_wave_nonlinearity(O, D, 0.08, 0.25);
  CHECK(sw.V / kTwoPi == doctest::Approx(20.0).epsilon(0.20));
  CHECK(standing_wave_nonlinearity(O, D, 0.0, 0.25).V == 0.0);
  CHECK(standing_wave_nonlinearity(O, D, 0.16, 0.25).V == doctest::Approx(16 * sw.V));
  CHECK_THROWS_AS(standing_wave_nonlinearity(O, 0.0, 0.08, 0.25), SchemaError);
}

TEST_CASE("compensation beams and residual shifts") {
  const ElementParams p;
  CompensationParams c;
  const auto cat = ac_stark_catalog_hobm(p, c);
  CHECK(cat.Omega_c[0] / kTwoPi == doctest::Approx(270e3).epsilon(0.02));
  CHECK(cat.Omega_c[1] / kTwoPi == doctest::Approx(380e3).epsilon(0.02));
  for (int i = 0; i < 2; ++i) {
    // quadratic part removed by the matching
    CHECK(std::abs(cat.G[i]) < 1e-9 * std::abs(cat.E_absorbed[i]));
    // constant part is kHz scale, linear part tens of Hz
    CHECK(std::abs(cat.E_absorbed[i]) / kTwoPi > 300.0);
    CHECK(std::abs(cat.E_absorbed[i]) / kTwoPi < 3e4);
    CHECK(std::abs(cat.F[i]) / kTwoPi < 50.0);
    CHECK(cat.E[i] == 0.0);
  }
  c.absorb_constant = false;
  const auto kept = ac_stark_catalog_hobm(p, c);
  for (int i = 0; i < 2; ++i) CHECK(kept.E[i] == doctest::Approx(cat.E_absorbed[i]));
  c.enabled = false;
  const auto bare = ac_stark_catalog_hobm(p, c);
  CHECK(std::abs(bare.G[0]) > 0.0);
  CHECK(std::abs(bare.F[0]) / kTwoPi > 50.0);
  ElementParams off = p;
  off.Omega1 = off.Omega2 = 0.0;
  CHECK(ac_stark_catalog_hobm(off, c).empty());
}

TEST_CASE("unsatisfiable matching is a schema error") {
  CompensationParams c;
  c.delta1 = -two_pi_hz(80e3);
  CHECK_THROWS_AS(ac_stark_catalog_hobm(ElementParams{}, c), SchemaError);
}

TEST_CASE("simulator with errors commutes with every Gauss operator") {
  auto lat = hobm_lattice(4, 10, 1);
  const Basis tensor = enumerate_tensor_basis(lat);
  const auto cat = ac_stark_catalog_hobm(ElementParams{}, {});
  const ModelParams mp{1.0, 0.2, 0.2};
  const SparseOp H = build_hobm_simulator(tensor, mp, cat, two_pi_hz(120));
  CHECK(test::gauss_commutator(H, tensor) < 1e-10);
  const RVec d = hobm_shift_diagonal(tensor, cat, two_pi_hz(120));
  CHECK(d.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("empty catalog reproduces the ideal model") {
  const auto lat = hobm_lattice(6, 10, 3);
  const Basis b = enumerate_gauge_sector(lat);
  const ModelParams mp{1.0, 0.3, 0.4};
  const SparseOp diff = build_hobm_simulator(b, mp, ShiftCatalog{}, 1.0) - build_hobm(b, mp);
  CHECK(diff.norm() == 0.0);
}

TEST_CASE("two-ion dense check of the effective tunnelling") {
  // deep inside the validity region the elimination is accurate
  const auto weak = two_ion_bruteforce(scaled(0.25), 16, 4);
  CHECK(weak.relative_error() < 0.02);
  // the validity warning is meaningful: violated by 3x, the formula fails
  const ElementParams strong = scaled(20.0);
  const auto v = effective_coupling(strong.f(), strong.g(), strong.theta, strong.delta, strong.d_eps(), strong.N);
  REQUIRE(v.validity.worst() >= 3.0);
  CHECK(two_ion_bruteforce(strong, 16, 4).relative_error() > 0.2);
  // expansion weights on the pure second sidebands follow the halved prediction
  const auto ld = two_ion_bruteforce(scaled(0.25), 16, 4, SidebandWeights::lamb_dicke);
  CHECK(ld.J_bruteforce == doctest::Approx(ld.J_lamb_dicke).epsilon(0.05));
  CHECK_THROWS_AS(two_ion_bruteforce(ElementParams{}, 11, 4), SchemaError);
}
