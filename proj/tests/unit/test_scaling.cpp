#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "lqed/models.hpp"
#include "lqed/scaling.hpp"

using namespace lqed;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = lo + (hi - lo) * i / (n - 1);
  return h;
}

}  // namespace

TEST_CASE("Coleman parameters in lattice units") {
  const auto p = coleman_params(0.3, 0.297);
  CHECK(p.J == 0.5);
  CHECK(p.V == doctest::Approx(0.045));
  CHECK(p.mu == doctest::Approx(0.0891));
  CHECK_THROWS_AS(coleman_params(0.0, 0.1), SchemaError);
}

TEST_CASE("scan agrees with dense ground states in the full gauge basis") {
  ScanConfig cfg;
  cfg.L = 6;
  const std::vector<double> h{-0.2, 0.0, 0.15};
  const auto r = scan(cfg, h);
  auto lat = qed_lattice(6, 6, 0.5);
  lat.total_charge = 0;
  const Basis b = enumerate_gauge_sector(lat);
  const RVec E = electric_observable(b);
  for (std::size_t k = 0; k < h.size(); ++k) {
    const SparseOp H = build_qed(b, coleman_params(0.3, 0.297 + h[k]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es{Eigen::MatrixXcd(H)};
    CHECK(r.energy[k] == doctest::Approx(es.eigenvalues()(0)).epsilon(1e-9));
    CHECK(r.order[k] == doctest::Approx(expectation(E, es.eigenvectors().col(0))).epsilon(1e-7));
  }
  cfg.workers = 3;
  const auto r3 = scan(cfg, h);
  for (std::size_t k = 0; k < h.size(); ++k) CHECK(r3.order[k] == doctest::Approx(r.order[k]).epsilon(1e-9));
}

TEST_CASE("pseudo-critical point of a smooth step") {
  const auto h = grid(-1.0, 1.0, 41);
  for (double h0 : {-0.33, 0.0, 0.21}) {
    std::vector<double> y(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) y[i] = std::tanh((h[i] - h0) / 0.2);
    CHECK(pseudo_critical_point(h, y) == doctest::Approx(h0).epsilon(5e-3));
  }
  std::vector<double> edge(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) edge[i] = std::exp(5 * h[i]);
  CHECK_THROWS_AS(pseudo_critical_point(h, edge), ConvergenceError);
}

TEST_CASE("collapse quality") {
  Curve a{{0, 1, 2}, {0, 1, 4}};
  CHECK(collapse_quality({a, a}) == doctest::Approx(0.0));
  Curve b{{0, 1, 2}, {1, 2, 5}};
  // constant offset 1 between two curves: variance 1/4 everywhere
  CHECK(collapse_quality({a, b}) == doctest::Approx(0.25));
}

TEST_CASE("synthetic samples collapse only at their own exponents") {
  const Exponents e{-0.125, 1.0, 0.8};
  std::vector<FssSample> ord, pc;
  for (int L : {8, 10, 12})
    for (int N : {10, 40, 160}) {
      const double x = std::pow(double(L), 1.0 / e.eta) / N;
      const double f = 1.0 + 0.3 * x;
      // order: y = L^{-(Delta' - Delta)} E_h / E_q must equal f(x)
      ord.push_back({L, N, f * std::pow(double(L), e.Delta - (-0.125)) * 0.3, 0.3});
      pc.push_back({L, N, (1.0 - 0.2 * x) * std::pow(double(L), 1.0 / e.nu - 1.0) * -0.2, -0.2});
    }
  const auto scores = collapse_scan(ord, pc, e);
  REQUIRE(scores.size() == 7);
  CHECK(scores[0].joint() < 1e-14);
  for (std::size_t i = 1; i < scores.size(); ++i) CHECK(scores[i].joint() > 1e-8);
}

TEST_CASE("order interpolation") {
  const std::vector<double> h{-1, 0.5, 2}, y{0, 3, 6};
  CHECK(interpolate_order(h, y, -0.25) == doctest::Approx(1.5));
  CHECK(interpolate_order(h, y, 1.0) == doctest::Approx(4.0));
}
