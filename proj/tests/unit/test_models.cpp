#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "lqed/models.hpp"

using namespace lqed;

namespace {

RVec spectrum(const SparseOp& H) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd(H);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(D);
  return es.eigenvalues();
}

RVec spin_spectrum(const LatticeSpec& lat, const ModelParams& p) {
  return spectrum(build_spin_model(eliminate_gauge_field(lat, p)).H);
}

}  // namespace

TEST_CASE("static energies of string and two-meson states") {
  const ModelParams p{0.0, 0.35, 0.8};
  for (int L : {6, 8, 10}) {
    const auto lat = qed_lattice(L);
    CHECK(model_diagonal(ModelFamily::qed, lat, string_configuration(lat), p) ==
          doctest::Approx((L - 1) * p.V + 2 * p.mu).epsilon(1e-12));
    CHECK(model_diagonal(ModelFamily::qed, lat, two_meson_configuration(lat), p) ==
          doctest::Approx(2 * p.V + 4 * p.mu).epsilon(1e-12));
    CHECK(classical_energy(string_charges(L), p) == doctest::Approx((L - 1) * p.V + 2 * p.mu));
    CHECK(classical_energy(two_meson_charges(L), p) == doctest::Approx(2 * p.V + 4 * p.mu));
  }
}

TEST_CASE("string breaking length") {
  // (L - 1) V + 2 mu >= 2 V + 4 mu  <=>  L >= 3 + 2 mu / V
  for (double r : {0.5, 1.0, 2.0, 3.0, 0.7, 2.2})
    CHECK(string_breaking_length(r, 1.0) == 3 + static_cast<int>(std::ceil(2 * r)));
}

TEST_CASE("string state carries one unit of flux") {
  const auto lat = qed_lattice(8);
  const Basis b = closure_basis(ModelFamily::qed, lat, {1, 0.2, 0.2}, {string_configuration(lat)});
  const Vec psi = string_state(b);
  CHECK(expectation(electric_observable(b), psi) == doctest::Approx(-1.0));
}

TEST_CASE("model Hamiltonians are Hermitian") {
  const ModelParams p{1.0, 0.3, 0.7};
  const auto check = [](const SparseOp& H) {
    const SparseOp A = SparseOp(H.adjoint()) - H;
    CHECK(A.norm() < 1e-13);
  };
  check(build_qed(enumerate_gauge_sector(qed_lattice(6, 3)), p));
  check(build_hobm(enumerate_gauge_sector(hobm_lattice(6, 10, 3)), p));
  check(build_qlm(enumerate_gauge_sector(qlm_lattice(4, MatterKind::spin)), p, ModelFamily::qlm_spin));
  check(build_qlm(enumerate_gauge_sector(qlm_lattice(4, MatterKind::boson, 2)), p, ModelFamily::qlm_boson));
}

TEST_CASE("gauge elimination reproduces the full spectrum") {
  const ModelParams p{1.0, 0.4, 0.6};
  for (const auto& lat : {qed_lattice(4, 4), hobm_lattice(4, 10, 4)}) {
    const ModelFamily f = lat.link.kind == LinkKind::rotor ? ModelFamily::qed : ModelFamily::hobm;
    const RVec full = spectrum(build_model(f, enumerate_gauge_sector(lat), p));
    const RVec red = spin_spectrum(lat, p);
    REQUIRE(full.size() == red.size());
    for (Eigen::Index k = 0; k < full.size(); ++k) CHECK(red(k) == doctest::Approx(full(k)).epsilon(1e-10));
  }
}

TEST_CASE("HOBM approaches QED as N grows") {
  const ModelParams p{1.0, 0.5, 0.5};
  const auto qed = spin_spectrum(qed_lattice(6, 3), p);
  double prev = 1e9;
  for (int N : {10, 40, 160}) {
    const auto h = spin_spectrum(hobm_lattice(6, N, 3), p);
    const double d = (h - qed).cwiseAbs().maxCoeff();
    CHECK(d < prev);
    prev = d;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("closure basis stays in the Gauss sector") {
  const auto lat = hobm_lattice(8, 10, 8);
  const Basis b = closure_basis(ModelFamily::hobm, lat, {1, 0.2, 0.2}, {string_configuration(lat)});
  CHECK_FALSE(b.gauss_projected());
  for (std::size_t i = 0; i < b.size(); ++i)
    for (double g : gauss_values(lat, b.state(i))) CHECK(g == 0.0);
}
