#include <doctest.h>

#include <set>

#include "lqed/hilbert.hpp"

using namespace lqed;

namespace {

// Gauss law written out by hand for open rotor chains: E_i - E_{i-1} = q_i.
bool rotor_gauss_ok(int L, const BasisState& s) {
  int left = 0;
  for (int i = 1; i < L; ++i) {
    const int tz = s.matter[i - 1] ? 1 : -1;
    const int charge = (tz + (i % 2 == 0 ? 1 : -1)) / 2;
    const int right = s.links[i - 1];  // rotor links store E
    if (right - left != charge) return false;
    left = right;
  }
  return true;
}

}  // namespace

TEST_CASE("staggered charges") {
  CHECK(staggered_charge(1, 1) == 0);
  CHECK(staggered_charge(1, 0) == -1);
  CHECK(staggered_charge(2, 1) == 1);
  CHECK(staggered_charge(2, 0) == 0);
}

TEST_CASE("encode and decode are inverse on the tensor basis") {
  for (const auto& lat : {qed_lattice(4, 2), hobm_lattice(4, 10, 2), qlm_lattice(4, MatterKind::boson, 2)}) {
    const Basis b = enumerate_tensor_basis(lat);
    std::set<std::uint64_t> seen;
    for (std::size_t i = 0; i < b.size(); ++i) {
      CHECK(encode(lat, b.state(i)) == b.key(i));
      seen.insert(b.key(i));
      REQUIRE(b.find(b.key(i)).value() == i);
    }
    CHECK(seen.size() == b.size());
  }
}

TEST_CASE("gauge sector matches a hand-written Gauss filter") {
  const int L = 6, lambda = 2;
  const auto lat = qed_lattice(L, lambda);
  const Basis tensor = enumerate_tensor_basis(lat);
  std::size_t count = 0;
  for (std::size_t i = 0; i < tensor.size(); ++i) count += rotor_gauss_ok(L, tensor.state(i));
  const Basis sector = enumerate_gauge_sector(lat);
  CHECK(sector.size() == count);
  for (std::size_t i = 0; i < sector.size(); ++i) CHECK(rotor_gauss_ok(L, sector.state(i)));
}

TEST_CASE("spin-1/2 link sector at L=2 with hard-core matter") {
  const auto lat = qlm_lattice(2, MatterKind::spin);
  const Basis sector = enumerate_gauge_sector(lat);
  for (std::size_t i = 0; i < sector.size(); ++i)
    for (double g : gauss_values(lat, sector.state(i))) CHECK(g == 0.0);
  const Basis tensor = enumerate_tensor_basis(lat);
  std::size_t count = 0;
  for (std::size_t i = 0; i < tensor.size(); ++i) {
    bool ok = true;
    for (double g : gauss_values(lat, tensor.state(i))) ok = ok && g == 0.0;
    count += ok;
  }
  CHECK(sector.size() == count);
  CHECK(count > 0);
}

TEST_CASE("dimension cap is enforced") {
  CHECK_THROWS_AS(enumerate_tensor_basis(qed_lattice(10, 4), 100), CapacityError);
}

TEST_CASE("boson window clips at zero occupation") {
  const auto lat = hobm_lattice(8, 2, 4);
  CHECK(lat.link.n_min == 0);
  CHECK(lat.link.n_max == 6);
  CHECK(lat.field_of(0) == -2.0);
}
