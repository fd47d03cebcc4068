#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "lqed/models.hpp"
#include "lqed/solvers.hpp"

using namespace lqed;

TEST_CASE("Lanczos ground state matches dense diagonalization") {
  const Basis b = enumerate_gauge_sector(qed_lattice(8, 3));
  const SparseOp H = build_qed(b, {0.5, 0.1, 0.045});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H)};
  const auto gs = ground_state(H);
  CHECK(gs.energy == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-10));
  CHECK(gs.residual <= 1e-10);
  CHECK(std::abs(gs.vector.dot(es.eigenvectors().col(0))) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Krylov propagation matches the dense exponential") {
  const auto lat = hobm_lattice(8, 10, 8);
  const Basis b = closure_basis(ModelFamily::hobm, lat, {1, 0.2, 0.2}, {string_configuration(lat)});
  REQUIRE(b.size() <= 512);
  const SparseOp H = build_hobm(b, {1, 0.2, 0.2});
  const Vec psi0 = string_state(b);
  const Eigen::MatrixXcd Hd(H);
  const auto times = uniform_grid(7.3, 11);
  double worst = 0;
  evolve(as_operator(H), psi0, times, [&](std::size_t, double t, const Vec& psi) {
    const Eigen::MatrixXcd U = (Hd * cplx(0, -t)).exp();
    worst = std::max(worst, (U * psi0 - psi).norm());
  });
  CHECK(worst < 1e-8);
}

TEST_CASE("time-dependent propagation of a driven two-level system") {
  // H(t) = cos(t) sigma_x commutes with itself, so U = exp(-i sin(t) sigma_x).
  TimeDependentOperator H;
  H.dim = 2;
  H.at = [](double t) {
    const double c = std::cos(t);
    return LinearOperator{2, [c](const Vec& x, Vec& y) {
                            y.resize(2);
                            y(0) = c * x(1);
                            y(1) = c * x(0);
                          }};
  };
  Vec psi0(2);
  psi0 << 1, 0;
  TimeDepOptions opt;
  opt.tol = 1e-10;
  double worst = 0;
  evolve_timedep(H, psi0, uniform_grid(6.0, 13), [&](std::size_t, double t, const Vec& psi) {
    worst = std::max(worst, std::abs(std::abs(psi(0)) - std::abs(std::cos(std::sin(t)))));
  }, opt);
  CHECK(worst < 1e-7);
}

TEST_CASE("running averages") {
  const auto t = uniform_grid(2.0, 201);
  std::vector<double> a(t.size()), zero(t.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) a[i] = t[i];
  const auto avg = time_average(t, a);
  const auto err = trajectory_error(t, a, zero);
  CHECK(avg.front() == 0.0);
  for (std::size_t i = 1; i < t.size(); ++i) {
    CHECK(avg[i] == doctest::Approx(t[i] / 2).epsilon(1e-12));
    CHECK(err[i] == doctest::Approx(t[i] / 2).epsilon(1e-12));
  }
}

TEST_CASE("uniform grid endpoints") {
  const auto t = uniform_grid(40 * kPi, 801);
  CHECK(t.size() == 801);
  CHECK(t.front() == 0.0);
  CHECK(t.back() == doctest::Approx(40 * kPi));
}
