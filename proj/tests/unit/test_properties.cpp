#include <doctest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "lqed/driven.hpp"
#include "lqed/models.hpp"
#include "lqed/qlm_drive.hpp"
#include "lqed/scaling.hpp"
#include "helpers.hpp"

using namespace lqed;

namespace {

// Small generators; each draw is reproducible from the seed.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  ModelParams params() { return {real(0.2, 2.0), real(-1.0, 1.0), real(0.0, 2.0)}; }
  LatticeSpec lattice(ModelFamily f) {
    const int L = integer(2, 4);
    switch (f) {
      case ModelFamily::qed: return qed_lattice(L, integer(1, 2), real(-0.5, 0.5));
      case ModelFamily::hobm: return hobm_lattice(L, integer(1, 12), integer(1, 2), real(-0.5, 0.5));
      case ModelFamily::qlm_spin: return qlm_lattice(L, MatterKind::spin);
      case ModelFamily::qlm_boson: return qlm_lattice(L, MatterKind::boson, integer(1, 2));
    }
    return {};
  }
  Vec state(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(real(-1, 1), real(-1, 1));
    return v.normalized();
  }
};

using test::gauss_commutator;
using test::hermiticity_defect;

constexpr ModelFamily kFamilies[] = {ModelFamily::qed, ModelFamily::hobm, ModelFamily::qlm_spin,
                                     ModelFamily::qlm_boson};

}  // namespace

TEST_CASE("property: Hermiticity and Gauss commutation for every model") {
  Gen gen(11);
  for (int trial = 0; trial < 12; ++trial)
    for (ModelFamily f : kFamilies) {
      const auto lat = gen.lattice(f);
      const Basis tensor = enumerate_tensor_basis(lat);
      const SparseOp H = build_model(f, tensor, gen.params());
      CHECK(hermiticity_defect(H) < 1e-12);
      CHECK(gauss_commutator(H, tensor) < 1e-10);
    }
}

TEST_CASE("property: error catalogs keep H Hermitian and gauge invariant") {
  Gen gen(12);
  for (int trial = 0; trial < 6; ++trial) {
    ElementParams e;
    e.Omega1 = two_pi_hz(gen.real(100e3, 250e3));
    e.Omega2 = two_pi_hz(gen.real(100e3, 250e3));
    e.N = gen.integer(4, 12);
    CompensationParams c;
    c.enabled = gen.integer(0, 1);
    c.mismatch = gen.real(0.0, 0.3);
    const auto cat = ac_stark_catalog_hobm(e, c);
    const auto lat = hobm_lattice(gen.integer(2, 4), static_cast<int>(e.N), 1);
    const Basis tensor = enumerate_tensor_basis(lat);
    const SparseOp H = build_hobm_simulator(tensor, gen.params(), cat, two_pi_hz(120));
    CHECK(hermiticity_defect(H) < 1e-12 * std::max(1.0, H.norm()));
    CHECK(gauss_commutator(H, tensor) < 1e-10 * std::max(1.0, H.norm()));
  }
  for (int L : {2, 4}) {
    QlmDriveParams p;
    p.L = L;
    p.n_max = 2;
    p.wz = two_pi_hz(gen.real(1e6, 3e6));
    const auto d = design_qlm_drive(p);
    const auto lat = qlm_drive_lattice(d);
    const Basis tensor = enumerate_tensor_basis(lat);
    const auto cat = ac_stark_catalog_qlm(d);
    for (bool ls0 : {false, true}) {
      const SparseOp H = test::with_diagonal(build_qlm(tensor, {1.0, 0.0, 0.0}, ModelFamily::qlm_boson),
                                             qlm_shift_diagonal(tensor, cat, ls0, d.J));
      CHECK(gauss_commutator(H, tensor) < 1e-10 * H.norm());
    }
  }
}

TEST_CASE("property: Krylov and dense propagation agree") {
  Gen gen(13);
  for (int trial = 0; trial < 8; ++trial) {
    const ModelFamily f = kFamilies[trial % 4];
    const auto lat = gen.lattice(f);
    const Basis b = enumerate_gauge_sector(lat);
    if (b.size() < 2 || b.size() > 512) continue;
    const SparseOp H = build_model(f, b, gen.params());
    const Vec psi0 = gen.state(static_cast<Eigen::Index>(b.size()));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H)};
    const Vec c0 = es.eigenvectors().adjoint() * psi0;
    double worst = 0;
    evolve(as_operator(H), psi0, uniform_grid(gen.real(1.0, 20.0), 9), [&](std::size_t, double t, const Vec& psi) {
      const Vec exact = es.eigenvectors() * (c0.array() * (es.eigenvalues().array() * cplx(0, -t)).exp()).matrix();
      worst = std::max(worst, (exact - psi).norm());
    });
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("property: pseudo-critical point ignores positive rescaling") {
  Gen gen(14);
  std::vector<double> h(31);
  for (int i = 0; i < 31; ++i) h[i] = -0.3 + 0.02 * i;
  for (int trial = 0; trial < 20; ++trial) {
    const double h0 = gen.real(-0.15, 0.15), w = gen.real(0.03, 0.1);
    std::vector<double> y(h.size()), z(h.size());
    const double a = gen.real(0.01, 100.0), c = gen.real(-5, 5);
    for (std::size_t i = 0; i < h.size(); ++i) {
      y[i] = std::tanh((h[i] - h0) / w) + 0.1 * h[i];
      z[i] = a * y[i] + c;
    }
    CHECK(pseudo_critical_point(h, z) == doctest::Approx(pseudo_critical_point(h, y)).epsilon(1e-10));
  }
}

TEST_CASE("property: encode and decode on random states") {
  Gen gen(15);
  for (int trial = 0; trial < 200; ++trial) {
    const auto lat = hobm_lattice(gen.integer(2, 12), gen.integer(1, 50), gen.integer(1, 6));
    BasisState s;
    for (int i = 0; i < lat.L; ++i) s.matter.push_back(gen.integer(0, 1));
    for (int k = 0; k < lat.num_links(); ++k) s.links.push_back(gen.integer(lat.link.n_min, lat.link.n_max));
    CHECK(decode(lat, encode(lat, s)) == s);
  }
}

TEST_CASE("property: closure basis is closed under the model") {
  Gen gen(16);
  for (int trial = 0; trial < 6; ++trial) {
    const int L = 2 * gen.integer(2, 4);
    const auto lat = hobm_lattice(L, gen.integer(L + 1, 20), L);
    const auto p = gen.params();
    const Basis b = closure_basis(ModelFamily::hobm, lat, p, {string_configuration(lat)});
    std::vector<Connection> out;
    for (std::size_t i = 0; i < b.size(); ++i) {
      out.clear();
      model_connections(ModelFamily::hobm, lat, b.state(i), p, out);
      for (const auto& c : out) CHECK(b.find(c.target).has_value());
    }
  }
}
