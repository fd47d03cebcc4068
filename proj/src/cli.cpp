#include "lqed/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <regex>
#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "lqed/io.hpp"
#include "lqed/iontrap.hpp"
#include "lqed/qlm_drive.hpp"
#include "lqed/solvers.hpp"

#ifndef LQED_VERSION
#define LQED_VERSION "unknown"
#endif

namespace lqed {

namespace {

std::string lower_trim(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }), s.end());
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw SchemaError(fmt::format("cannot read {} from '{}'", what, s));
  }
  if (used != s.size() || !std::isfinite(v)) throw SchemaError(fmt::format("cannot read {} from '{}'", what, s));
  return v;
}

}  // namespace

double parse_frequency(const std::string& raw) {
  const std::string s = lower_trim(raw);
  static const std::pair<const char*, double> units[] = {{"ghz", 1e9}, {"mhz", 1e6}, {"khz", 1e3}, {"hz", 1.0}};
  for (const auto& [u, scale] : units) {
    const std::string suf(u);
    if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
      return two_pi_hz(parse_number(s.substr(0, s.size() - suf.size()), "frequency") * scale);
  }
  return two_pi_hz(parse_number(s, "frequency"));
}

double parse_time(const std::string& raw) {
  const std::string s = lower_trim(raw);
  static const std::regex form(R"(^([-+0-9.e]*)\*?(pi)?(/([0-9.e+-]+))?$)");
  std::smatch m;
  if (!std::regex_match(s, m, form) || s.empty()) throw SchemaError(fmt::format("cannot read time from '{}'", raw));
  double v = 1.0;
  if (m[1].length() > 0) v = parse_number(m[1].str(), "time");
  else if (!m[2].matched) throw SchemaError(fmt::format("cannot read time from '{}'", raw));
  if (m[2].matched) v *= kPi;
  if (m[4].matched) {
    const double den = parse_number(m[4].str(), "time");
    if (den == 0.0) throw SchemaError("division by zero in time");
    v /= den;
  }
  return v;
}

std::vector<int> parse_int_list(const std::string& raw) {
  std::vector<int> out;
  std::stringstream ss(lower_trim(raw));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_number(item, "integer");
    if (v != std::floor(v) || std::abs(v) > 1e9) throw SchemaError(fmt::format("'{}' is not an integer", item));
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw SchemaError("empty integer list");
  return out;
}

bool parse_switch(const std::string& raw) {
  const std::string s = lower_trim(raw);
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw SchemaError(fmt::format("expected on/off, got '{}'", raw));
}

QuenchTrace string_quench(int L, int N, const ModelParams& p, const std::vector<double>& times,
                          const ShiftCatalog* catalog, double energy_unit) {
  if (N < 0) throw SchemaError("N must be non-negative");
  const bool qed = N == 0;
  if (qed && catalog) throw SchemaError("error catalogs apply to the HOBM only");
  const LatticeSpec lat = qed ? qed_lattice(L, L / 2 + 2, 0.0) : hobm_lattice(L, N, L, 0.0);
  const ModelFamily f = qed ? ModelFamily::qed : ModelFamily::hobm;
  const BasisState s0 = string_configuration(lat);
  const Basis basis = closure_basis(f, lat, p, {s0});
  const SparseOp H = catalog ? build_hobm_simulator(basis, p, *catalog, energy_unit) : build_model(f, basis, p);
  const Vec psi0 = product_state(basis, s0);
  const RVec Eobs = electric_observable(basis);
  QuenchTrace tr;
  tr.t = times;
  tr.E.resize(times.size());
  tr.dim = basis.size();
  evolve(as_operator(H), psi0, times, [&](std::size_t i, double, const Vec& psi) {
    tr.E[i] = expectation(Eobs, psi);
    for (double g : gauss_violation(basis, psi)) tr.gauss_max = std::max(tr.gauss_max, g);
    tr.norm_drift = std::max(tr.norm_drift, std::abs(psi.norm() - 1.0));
  });
  return tr;
}

double trend_ratio(const std::vector<double>& t, const std::vector<double>& y) {
  if (t.size() != y.size() || t.size() < 4) throw SchemaError("trend needs at least four samples");
  const std::size_t a = t.size() / 2;
  const double n = static_cast<double>(t.size() - a);
  double mt = 0, my = 0;
  for (std::size_t i = a; i < t.size(); ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = a; i < t.size(); ++i) {
    sxy += (t[i] - mt) * (y[i] - my);
    sxx += (t[i] - mt) * (t[i] - mt);
  }
  const double slope = sxy / sxx;
  const double scale = std::abs(my) > 0 ? std::abs(my) : 1.0;
  return slope * (t.back() - t[a]) / scale;
}

ColemanStudy coleman_study(const std::vector<int>& Ls, const std::vector<int>& Ns, double ga, double mc,
                           const std::vector<double>& h_grid, int workers, const Exponents& nominal) {
  ColemanStudy st;
  st.Ls = Ls;
  st.Ns = Ns;
  for (int L : Ls) {
    std::vector<int> cases{0};
    cases.insert(cases.end(), Ns.begin(), Ns.end());
    for (int N : cases) {
      ScanConfig cfg;
      cfg.family = N == 0 ? ScanFamily::qed : ScanFamily::hobm;
      cfg.L = L;
      cfg.N = N;
      cfg.ga = ga;
      cfg.mc = mc;
      cfg.workers = workers;
      auto r = scan(cfg, h_grid);
      st.h_pc[{L, N}] = pseudo_critical_point(r.h, r.order);
      st.order_at_mc[{L, N}] = interpolate_order(r.h, r.order, 0.0);
      st.scans[{L, N}] = std::move(r);
    }
  }
  std::vector<FssSample> ord, pc;
  for (int L : Ls)
    for (int N : Ns) {
      ord.push_back({L, N, st.order_at_mc[{L, N}], st.order_at_mc[{L, 0}]});
      pc.push_back({L, N, st.h_pc[{L, N}], st.h_pc[{L, 0}]});
    }
  if (Ls.size() > 1 && Ns.size() > 1) st.scores = collapse_scan(ord, pc, nominal);
  return st;
}

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

using Config = std::map<std::string, std::string>;

struct OptSpec {
  std::string name;
  std::string value;
  std::string help;
};

struct Context {
  fs::path out;
  int workers = 1;
  std::vector<std::string> outputs;
  json results = json::object();

  std::string file(const std::string& name) {
    outputs.push_back(name);
    return (out / name).string();
  }
};

struct Reader {
  const Config& c;
  const std::string& at(const std::string& k) const {
    auto it = c.find(k);
    if (it == c.end()) throw SchemaError(fmt::format("missing option '{}'", k));
    return it->second;
  }
  double num(const std::string& k) const { return parse_number(lower_trim(at(k)), k); }
  int integer(const std::string& k) const {
    const auto v = parse_int_list(at(k));
    if (v.size() != 1) throw SchemaError(fmt::format("option '{}' takes one integer", k));
    return v[0];
  }
  double freq(const std::string& k) const { return parse_frequency(at(k)); }
  double time(const std::string& k) const { return parse_time(at(k)); }
  std::vector<int> ints(const std::string& k) const { return parse_int_list(at(k)); }
  bool on(const std::string& k) const { return parse_switch(at(k)); }
};

struct Scenario {
  std::string name;
  std::string help;
  std::vector<OptSpec> options;
  std::function<int(const Reader&, Context&)> run;
};

int invariant_failure(const std::string& what) {
  spdlog::error("invariant violated: {}", what);
  return 4;
}

// string-break ------------------------------------------------------------

int run_string_break(const Reader& r, Context& ctx) {
  const int L = r.integer("L");
  const auto Ns = r.ints("N");
  const ModelParams p{r.num("J"), r.num("mu"), r.num("V")};
  const auto times = uniform_grid(r.time("tmax"), r.integer("samples"));
  const double gauss_tol = r.num("gauss_tol"), norm_tol = r.num("norm_tol");
  const auto qed = string_quench(L, 0, p, times);
  const auto qavg = time_average(times, qed.E);
  write_columns(ctx.file("string_break_qed.csv"), {"t", "E", "E_avg"}, {times, qed.E, qavg});
  double gmax = qed.gauss_max, ndrift = qed.norm_drift;
  for (int N : Ns) {
    if (N <= 0) throw SchemaError("N must be positive");
    const auto h = string_quench(L, N, p, times);
    const auto eps = trajectory_error(times, h.E, qed.E);
    write_columns(ctx.file(fmt::format("string_break_N{}.csv", N)), {"t", "E", "E_avg", "eps", "E_qed"},
                  {times, h.E, time_average(times, h.E), eps, qed.E});
    ctx.results[fmt::format("N{}", N)] = {{"max_eps", *std::max_element(eps.begin(), eps.end())},
                                           {"trend", trend_ratio(times, eps)},
                                           {"dim", h.dim}};
    gmax = std::max(gmax, h.gauss_max);
    ndrift = std::max(ndrift, h.norm_drift);
  }
  ctx.results["gauss_max"] = gmax;
  ctx.results["norm_drift"] = ndrift;
  if (gmax > gauss_tol) return invariant_failure(fmt::format("Gauss violation {:.3e}", gmax));
  if (ndrift > norm_tol) return invariant_failure(fmt::format("norm drift {:.3e}", ndrift));
  return 0;
}

// coleman -----------------------------------------------------------------

int run_coleman(const Reader& r, Context& ctx) {
  const auto Ls = r.ints("L");
  const auto Ns = r.ints("N");
  const double ga = r.num("ga"), mc = r.num("mc");
  const int points = r.integer("points");
  const double lo = r.num("mg_min") - mc, hi = r.num("mg_max") - mc;
  if (points < 7 || !(hi > lo)) throw SchemaError("need at least 7 grid points on an increasing range");
  std::vector<double> h(points);
  for (int i = 0; i < points; ++i) h[i] = lo + (hi - lo) * i / (points - 1);
  const Exponents e{r.num("Delta"), r.num("nu"), r.num("eta")};
  const auto st = coleman_study(Ls, Ns, ga, mc, h, ctx.workers, e);
  for (const auto& [key, res] : st.scans) {
    const auto [L, N] = key;
    const std::string name = N == 0 ? fmt::format("coleman_qed_L{}.csv", L) : fmt::format("coleman_hobm_L{}_N{}.csv", L, N);
    write_scan_csv(ctx.file(name), res, {L, N, ga});
  }
  CsvWriter sum(ctx.file("coleman_points.csv"), {"L", "N", "mg_pc", "E_at_mc"});
  for (const auto& [key, v] : st.h_pc) sum.row({double(key.first), double(key.second), v + mc, st.order_at_mc.at(key)});
  if (!st.scores.empty()) {
    CsvWriter col(ctx.file("coleman_collapse.csv"), {"set", "Delta", "nu", "eta", "score_order", "score_pc", "joint"});
    for (std::size_t i = 0; i < st.scores.size(); ++i) {
      const auto& s = st.scores[i];
      col.row({double(i), s.e.Delta, s.e.nu, s.e.eta, s.order, s.pc, s.joint()});
      ctx.results["collapse"][s.label] = s.joint();
    }
  }
  return 0;
}

// fvd ---------------------------------------------------------------------

int run_fvd(const Reader& r, Context& ctx) {
  QlmDriveParams p;
  p.L = r.integer("L");
  p.n_max = r.integer("nmax");
  p.order = r.integer("order");
  p.wz = r.freq("wz");
  p.Omega1 = r.freq("omega1");
  p.eta_quoted = r.num("eta");
  const std::string reading = lower_trim(r.at("eta_reading"));
  if (reading != "eta12" && reading != "eta11") throw SchemaError("eta_reading must be eta12 or eta11");
  p.reading = reading == "eta11" ? EtaReading::eta11 : EtaReading::eta12;
  p.exact_carrier = r.on("exact_carrier");
  const std::string mode = lower_trim(r.at("compensate"));
  std::vector<bool> runs;
  if (mode == "both") runs = {true, false};
  else runs = {parse_switch(mode)};
  const auto times = uniform_grid(r.time("tmax"), r.integer("samples"));
  const double edge_tol = r.num("boundary_tol");
  double worst_edge = 0.0;
  for (bool comp : runs) {
    p.compensate = comp;
    const auto d = design_qlm_drive(p);
    const auto tr = false_vacuum_decay(d, times);
    const std::string tag = comp ? "comp" : "uncomp";
    write_columns(ctx.file(fmt::format("fvd_{}.csv", tag)), {"t", "E_mean", "gauss_max", "phonon_boundary_weight", "E_ideal"},
                  {tr.t, tr.E_drive, tr.gauss_max, tr.boundary, tr.E_ideal});
    const double edge = *std::max_element(tr.boundary.begin(), tr.boundary.end());
    worst_edge = std::max(worst_edge, edge);
    ctx.results[tag] = {{"J_hz", d.J / kTwoPi},
                        {"Omega_khz", [&] {
                           std::vector<double> v;
                           for (double o : d.Omega) v.push_back(o / kTwoPi / 1e3);
                           return v;
                         }()},
                        {"rms_over_amplitude", rms_deviation(tr.E_drive, tr.E_ideal) / oscillation_amplitude(tr.E_ideal)},
                        {"gauss_max", *std::max_element(tr.gauss_max.begin(), tr.gauss_max.end())},
                        {"boundary_max", edge}};
  }
  if (worst_edge > edge_tol) return invariant_failure(fmt::format("phonon boundary weight {:.3e}, raise nmax", worst_edge));
  return 0;
}

// modes -------------------------------------------------------------------

int run_modes(const Reader& r, Context& ctx) {
  DesignParams base;
  base.ions_per_block = r.integer("ions_per_block");
  base.jitter = r.freq("jitter");
  base.seed = static_cast<std::uint64_t>(r.integer("seed"));
  base.Delta_T = r.freq("Delta_T");
  base.Delta_B = r.freq("Delta_B");
  base.delta_T = r.freq("delta_T");
  base.spacing = r.num("spacing_um") * 1e-6;
  CsvWriter sum(ctx.file("modes_summary.csv"),
                {"blocks", "ions", "leak_x", "leak_y", "crosstalk_x", "crosstalk_y", "bound_x", "bound_y", "theta12"});
  DesignParams last = base;
  for (int b : r.ints("blocks")) {
    DesignParams p = base;
    p.blocks = b;
    const auto rep = analyze_array(p);
    sum.row({double(b), double(b * p.ions_per_block), rep.leak_x, rep.leak_y, rep.crosstalk_x, rep.crosstalk_y,
             rep.bound_x, rep.bound_y, rep.theta12});
    last = p;
  }
  if (r.on("matrices")) {
    const auto t = design_frequencies(last);
    const auto z = equilibrium_positions(t);
    for (Axis a : {Axis::x, Axis::y}) {
      const auto m = normal_modes(coupling_matrix(t, z, a), a, design_pairs(t.size(), a));
      std::vector<std::string> head{"ion"};
      for (int q = 0; q < t.size(); ++q) head.push_back(fmt::format("q{}", q + 1));
      CsvWriter w(ctx.file(fmt::format("modes_M{}.csv", a == Axis::x ? "x" : "y")), head);
      for (int l = 0; l < t.size(); ++l) {
        std::vector<double> row{double(l + 1)};
        for (int q = 0; q < t.size(); ++q) row.push_back(m.M(l, q));
        w.row(row);
      }
    }
  }
  return 0;
}

// hobm-qs -----------------------------------------------------------------

int run_hobm_qs(const Reader& r, Context& ctx) {
  const int L = r.integer("L"), N = r.integer("N");
  const double J = r.freq("J");
  const ModelParams p{1.0, r.freq("mu") / J, r.freq("V") / J};
  ElementParams e;
  e.Omega1 = r.freq("omega1");
  e.Omega2 = r.freq("omega2");
  e.eta = r.num("eta");
  e.theta = r.num("theta");
  e.delta = r.freq("delta");
  e.eps1 = r.freq("eps1");
  e.eps2 = r.freq("eps2");
  e.N = N;
  CompensationParams c;
  c.enabled = r.on("compensate");
  c.delta1 = r.freq("delta1");
  c.delta2 = r.freq("delta2");
  c.mismatch = r.num("mismatch");
  c.absorb_constant = r.on("absorb");
  const auto cat = ac_stark_catalog_hobm(e, c);
  CsvWriter cw(ctx.file("hobm_qs_catalog.csv"), {"ion", "a0_hz", "a1_hz", "a2_hz", "a_ph_hz"});
  for (const auto& part : cat.parts)
    cw.row({double(part.ion + 1), part.shift.a0 / kTwoPi, part.shift.a1 / kTwoPi, part.shift.a2 / kTwoPi,
            part.shift.a_ph / kTwoPi});
  const auto eff = effective_coupling(e.f(), e.g(), e.theta, e.delta, e.d_eps(), N);
  ctx.results["J_effective_hz"] = std::abs(eff.J) / kTwoPi;
  ctx.results["validity_worst"] = eff.validity.worst();
  for (int i = 0; i < 2; ++i) {
    ctx.results[fmt::format("ion{}", i + 1)] = {{"E_hz", cat.E[i] / kTwoPi},
                                                {"F_hz", cat.F[i] / kTwoPi},
                                                {"G_hz", cat.G[i] / kTwoPi},
                                                {"E_absorbed_hz", cat.E_absorbed[i] / kTwoPi},
                                                {"Omega_c_khz", cat.Omega_c[i] / kTwoPi / 1e3}};
  }
  const auto times = uniform_grid(r.time("tmax"), r.integer("samples"));
  const auto qed = string_quench(L, 0, p, times);
  const auto ideal = string_quench(L, N, p, times);
  const auto sim = string_quench(L, N, p, times, &cat, J);
  const auto eps_ideal = trajectory_error(times, ideal.E, qed.E);
  const auto eps_sim = trajectory_error(times, sim.E, ideal.E);
  write_columns(ctx.file("hobm_qs.csv"), {"t", "E_qed", "E_hobm", "E_sim", "eps_hobm_qed", "eps_sim_hobm"},
                {times, qed.E, ideal.E, sim.E, eps_ideal, eps_sim});
  ctx.results["max_eps_hobm_qed"] = *std::max_element(eps_ideal.begin(), eps_ideal.end());
  ctx.results["max_eps_sim_hobm"] = *std::max_element(eps_sim.begin(), eps_sim.end());
  const double g = std::max({qed.gauss_max, ideal.gauss_max, sim.gauss_max});
  if (g > r.num("gauss_tol")) return invariant_failure(fmt::format("Gauss violation {:.3e}", g));
  return 0;
}

std::vector<Scenario> scenarios() {
  return {
      {"string-break",
       "String-breaking quench, HOBM against QED",
       {{"L", "12", "sites"},
        {"N", "10", "boson offsets, comma separated"},
        {"J", "1", "hopping"},
        {"mu", "0.2", "mass, units of J"},
        {"V", "0.2", "electric energy, units of J"},
        {"tmax", "40pi", "final time, units of 1/J"},
        {"samples", "801", "time samples"},
        {"gauss_tol", "1e-10", "allowed Gauss violation"},
        {"norm_tol", "1e-8", "allowed norm drift"}},
       run_string_break},
      {"coleman",
       "Ground-state scans across the Coleman transition and collapse scores",
       {{"L", "8,10,12", "sites"},
        {"N", "10,40,160", "boson offsets"},
        {"ga", "0.3", "coupling times lattice spacing"},
        {"mc", "0.297", "reference m/g; h = m/g - mc"},
        {"mg_min", "-0.05", "first m/g"},
        {"mg_max", "0.40", "last m/g"},
        {"points", "46", "grid points"},
        {"Delta", "-0.125", "exponent Delta'"},
        {"nu", "1", "exponent nu'"},
        {"eta", "0.8", "exponent eta'"}},
       run_coleman},
      {"fvd",
       "False-vacuum decay under the full microwave drive",
       {{"L", "4", "ions"},
        {"nmax", "4", "phonon cutoff"},
        {"order", "2", "Lamb-Dicke order"},
        {"compensate", "both", "on, off or both"},
        {"exact_carrier", "off", "exact two-level carrier compensation"},
        {"wz", "2mhz", "axial trap frequency"},
        {"omega1", "150khz", "Rabi frequency of ion 1"},
        {"eta", "0.15", "quoted Lamb-Dicke parameter"},
        {"eta_reading", "eta12", "eta12 or eta11"},
        {"tmax", "4pi", "final time, units of 1/J"},
        {"samples", "401", "time samples"},
        {"boundary_tol", "1e-4", "allowed weight at the phonon cutoff"}},
       run_fvd},
      {"modes",
       "Radial mode structure of the micro-trap array",
       {{"blocks", "1,2", "block counts"},
        {"ions_per_block", "6", "ions per block"},
        {"Delta_T", "500khz", "trap offset between pairs"},
        {"Delta_B", "50khz", "offset between blocks"},
        {"delta_T", "5khz", "offset within a pair"},
        {"spacing_um", "30", "trap spacing in micrometres"},
        {"jitter", "0hz", "half-width of random frequency offsets"},
        {"seed", "0", "jitter seed"},
        {"matrices", "off", "also write M for the last block count"}},
       run_modes},
      {"hobm-qs",
       "HOBM quantum simulator with AC-Stark errors",
       {{"L", "8", "sites"},
        {"N", "10", "boson offset"},
        {"J", "120hz", "tunnelling"},
        {"mu", "25hz", "mass"},
        {"V", "25hz", "electric energy"},
        {"omega1", "180khz", "Rabi frequency, ion 1"},
        {"omega2", "210khz", "Rabi frequency, ion 2"},
        {"eta", "0.08", "Lamb-Dicke parameter"},
        {"theta", "0.25", "pair angle"},
        {"delta", "-50khz", "sideband detuning"},
        {"eps1", "5mhz", "gauge mode"},
        {"eps2", "5.01mhz", "bus mode"},
        {"compensate", "on", "compensation beams"},
        {"delta1", "80khz", "compensation detuning, ion 1"},
        {"delta2", "120khz", "compensation detuning, ion 2"},
        {"mismatch", "0.1", "fraction of the matched intensity left out"},
        {"absorb", "on", "fold constant shifts into the detunings"},
        {"tmax", "40pi", "final time, units of 1/J"},
        {"samples", "801", "time samples"},
        {"gauss_tol", "1e-10", "allowed Gauss violation"}},
       run_hobm_qs},
  };
}

fs::path default_output() {
  if (const char* env = std::getenv("LQED_OUTPUT_DIR"); env && *env) return env;
  return ".";
}

int execute(const Scenario& sc, const Config& cfg, const fs::path& out, int workers) {
  fs::create_directories(out);
  Context ctx;
  ctx.out = out;
  ctx.workers = workers;
  const auto start = std::chrono::steady_clock::now();
  const int code = sc.run(Reader{cfg}, ctx);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json meta;
  meta["version"] = LQED_VERSION;
  meta["subcommand"] = sc.name;
  meta["config"] = cfg;
  meta["workers"] = workers;
  meta["wall_time_s"] = wall;
  meta["outputs"] = ctx.outputs;
  meta["results"] = ctx.results;
  meta["exit_code"] = code;
  std::ofstream(out / (sc.name + ".json")) << meta.dump(2) << '\n';
  return code;
}

}  // namespace

int run_cli(int argc, char** argv) {
  const auto all = scenarios();
  CLI::App app{"Lattice gauge theory quantum-simulation scenarios"};
  app.require_subcommand(0, 1);
  app.fallthrough();
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "INI file with one [subcommand] section per scenario");
  std::string out = default_output().string();
  int workers = 1;
  std::string replay;
  app.add_option("--out", out, "output directory (default $LQED_OUTPUT_DIR or .)");
  app.add_option("--workers", workers, "parallel workers")->check(CLI::PositiveNumber);
  app.add_option("--replay", replay, "re-run from a JSON sidecar");
  std::map<std::string, Config> configs;
  std::map<std::string, CLI::App*> subs;
  for (const auto& sc : all) {
    auto* sub = app.add_subcommand(sc.name, sc.help);
    auto& cfg = configs[sc.name];
    for (const auto& o : sc.options) {
      cfg[o.name] = o.value;
      sub->add_option("--" + o.name, cfg[o.name], o.help)->capture_default_str();
    }
    subs[sc.name] = sub;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (!replay.empty()) {
      std::ifstream in(replay);
      if (!in) throw SchemaError(fmt::format("cannot open sidecar '{}'", replay));
      json meta;
      try {
        in >> meta;
      } catch (const json::exception& e) {
        throw SchemaError(fmt::format("malformed sidecar: {}", e.what()));
      }
      const std::string name = meta.value("subcommand", "");
      auto it = std::find_if(all.begin(), all.end(), [&](const Scenario& s) { return s.name == name; });
      if (it == all.end()) throw SchemaError(fmt::format("unknown subcommand '{}' in sidecar", name));
      Config cfg = configs[name];
      for (auto& [k, v] : meta.at("config").items()) {
        if (!cfg.count(k)) throw SchemaError(fmt::format("unknown option '{}' in sidecar", k));
        cfg[k] = v.get<std::string>();
      }
      return execute(*it, cfg, out, meta.value("workers", workers));
    }
    for (const auto& sc : all)
      if (subs[sc.name]->parsed()) return execute(sc, configs[sc.name], out, workers);
    std::cout << app.help();
    return 2;
  } catch (const SchemaError& e) {
    spdlog::error("schema: {}", e.what());
    return 2;
  } catch (const CapacityError& e) {
    spdlog::error("capacity: {}", e.what());
    return 3;
  } catch (const ConvergenceError& e) {
    spdlog::error("convergence: {} (residual {:.3e})", e.what(), e.residual);
    return 4;
  } catch (const json::exception& e) {
    spdlog::error("schema: {}", e.what());
    return 2;
  }
}

}  // namespace lqed
