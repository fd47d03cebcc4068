#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqed/cli.hpp"
#include "lqed/iontrap.hpp"

using namespace lqed;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "lqed");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("lqed_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("frequency parsing") {
  CHECK(parse_frequency("120hz") == doctest::Approx(two_pi_hz(120)));
  CHECK(parse_frequency("5 MHz") == doctest::Approx(two_pi_hz(5e6)));
  CHECK(parse_frequency("-50kHz") == doctest::Approx(-two_pi_hz(50e3)));
  CHECK(parse_frequency("2.5e3") == doctest::Approx(two_pi_hz(2.5e3)));
  CHECK_THROWS_AS(parse_frequency("5 furlongs"), SchemaError);
  CHECK_THROWS_AS(parse_frequency(""), SchemaError);
}

TEST_CASE("time parsing") {
  CHECK(parse_time("40pi") == doctest::Approx(40 * kPi));
  CHECK(parse_time("4*pi") == doctest::Approx(4 * kPi));
  CHECK(parse_time("pi/2") == doctest::Approx(kPi / 2));
  CHECK(parse_time("12.5") == doctest::Approx(12.5));
  CHECK_THROWS_AS(parse_time("tau"), SchemaError);
  CHECK_THROWS_AS(parse_time("pi/0"), SchemaError);
}

TEST_CASE("lists and switches") {
  CHECK(parse_int_list("8, 10,12") == std::vector<int>{8, 10, 12});
  CHECK_THROWS_AS(parse_int_list("8,1.5"), SchemaError);
  CHECK(parse_switch("On"));
  CHECK_FALSE(parse_switch("off"));
  CHECK_THROWS_AS(parse_switch("maybe"), SchemaError);
}

TEST_CASE("trend ratio") {
  std::vector<double> t, flat, ramp;
  for (int i = 0; i <= 100; ++i) {
    t.push_back(i);
    flat.push_back(2.0 + 0.01 * std::sin(3.0 * i));
    ramp.push_back(1.0 + 0.02 * i);
  }
  CHECK(std::abs(trend_ratio(t, flat)) < 0.02);
  // slope 0.02 over 50 units against a mean of 2.5
  CHECK(trend_ratio(t, ramp) == doctest::Approx(0.4));
}

TEST_CASE("string-break run and byte-identical replay") {
  const auto a = scratch("a"), b = scratch("b");
  REQUIRE(run({"string-break", "--L", "6", "--N", "10,20", "--tmax", "4pi", "--samples", "41", "--out", a.string()}) == 0);
  for (const char* f : {"string_break_qed.csv", "string_break_N10.csv", "string_break_N20.csv", "string-break.json"})
    CHECK(fs::exists(a / f));
  REQUIRE(run({"--replay", (a / "string-break.json").string(), "--out", b.string()}) == 0);
  for (const char* f : {"string_break_qed.csv", "string_break_N10.csv", "string_break_N20.csv"})
    CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("INI configuration") {
  const auto a = scratch("ini");
  fs::create_directories(a);
  std::ofstream(a / "run.ini") << "[modes]\nblocks=1\nions_per_block=4\n";
  REQUIRE(run({"--config", (a / "run.ini").string(), "modes", "--out", a.string()}) == 0);
  const std::string csv = slurp(a / "modes_summary.csv");
  CHECK(csv.find("4.000000000000e+00") != std::string::npos);
}

TEST_CASE("exit codes") {
  const auto a = scratch("codes");
  CHECK(run({"string-break", "--L", "abc", "--out", a.string()}) == 2);
  CHECK(run({"string-break", "--bogus", "1"}) == 2);
  CHECK(run({"fvd", "--wz", "3 parsecs", "--out", a.string()}) == 2);
  CHECK(run({"--replay", (a / "missing.json").string()}) == 2);
  // tensor space beyond the dimension cap
  CHECK(run({"fvd", "--L", "8", "--nmax", "8", "--out", a.string()}) == 3);
  // cutoff weight above the tolerance is an invariant violation
  CHECK(run({"fvd", "--L", "2", "--nmax", "2", "--tmax", "pi/4", "--samples", "11", "--compensate", "on",
             "--boundary_tol", "0", "--out", a.string()}) == 4);
  CHECK(fs::exists(a / "fvd_comp.csv"));
}
