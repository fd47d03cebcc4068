#include "lqed/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <numeric>
#include <fmt/format.h>

#include "lqed/io.hpp"
#include "lqed/models.hpp"

namespace lqed {

ModelParams coleman_params(double ga, double m_over_g) {
  if (!(ga > 0.0)) throw SchemaError("ga must be positive");
  const double g = ga;
  return {0.5, m_over_g * g, 0.5 * g * g};
}

namespace {

LatticeSpec scan_lattice(const ScanConfig& cfg) {
  // Windows wide enough that the eliminated model never clips from above.
  LatticeSpec lat = cfg.family == ScanFamily::qed
                        ? qed_lattice(cfg.L, cfg.L, cfg.alpha)
                        : hobm_lattice(cfg.L, cfg.N, cfg.N + cfg.L, cfg.alpha);
  lat.total_charge = 0;
  return lat;
}

}  // namespace

ScanResult scan(const ScanConfig& cfg, const std::vector<double>& h_grid) {
  if (h_grid.empty()) throw SchemaError("empty h grid");
  if (!std::is_sorted(h_grid.begin(), h_grid.end())) throw SchemaError("h grid must be sorted");
  const LatticeSpec lat = scan_lattice(cfg);
  // H(mu) = H(0) + mu * (particle number), so the hopping part is built once.
  auto p0 = coleman_params(cfg.ga, 0.0);
  p0.mu = 0.0;
  const SpinModel base = build_spin_model(eliminate_gauge_field(lat, p0));
  auto p1 = p0;
  p1.mu = 1.0;
  const SpinModel shifted = build_spin_model(eliminate_gauge_field(lat, p1));
  const auto n = base.H.rows();
  RVec number(n);
  for (Eigen::Index i = 0; i < n; ++i) number[i] = (shifted.H.coeff(i, i) - base.H.coeff(i, i)).real();

  ScanResult r;
  r.h = h_grid;
  r.order.resize(h_grid.size());
  r.energy.resize(h_grid.size());
  auto solve = [&](std::size_t k) {
    const double mu = coleman_params(cfg.ga, cfg.mc + h_grid[k]).mu;
    LinearOperator op{n, [&, mu](const Vec& x, Vec& y) {
                        y.noalias() = base.H * x;
                        y.array() += mu * number.array() * x.array();
                      }};
    auto gs = ground_state(op, cfg.lanczos);
    r.order[k] = expectation(base.electric, gs.vector);
    r.energy[k] = gs.energy;
  };
  const int workers = std::max(1, cfg.workers);
  if (workers == 1) {
    for (std::size_t k = 0; k < h_grid.size(); ++k) solve(k);
  } else {
    for (std::size_t start = 0; start < h_grid.size(); start += workers) {
      std::vector<std::future<void>> jobs;
      for (std::size_t k = start; k < std::min(h_grid.size(), start + workers); ++k)
        jobs.push_back(std::async(std::launch::async, solve, k));
      for (auto& j : jobs) j.get();
    }
  }
  return r;
}

double pseudo_critical_point(const std::vector<double>& h, const std::vector<double>& order) {
  if (h.size() != order.size()) throw SchemaError("scan arrays differ in length");
  if (h.size() < 7) throw SchemaError("pseudo-critical point needs at least 7 grid points");
  const double dh = h[1] - h[0];
  if (!(dh > 0.0)) throw SchemaError("h grid must be increasing");
  for (std::size_t i = 1; i < h.size(); ++i)
    if (std::abs((h[i] - h[i - 1]) - dh) > 1e-8 * std::max(std::abs(dh), 1e-300) + 1e-12 * std::abs(h[i]))
      throw SchemaError("h grid must be uniform");
  std::vector<double> d;
  for (std::size_t i = 2; i + 2 < h.size(); ++i)
    d.push_back((order[i - 2] - 8 * order[i - 1] + 8 * order[i + 1] - order[i + 2]) / (12 * dh));
  const auto it = std::max_element(d.begin(), d.end());
  const auto k = static_cast<std::size_t>(it - d.begin());
  if (k == 0 || k + 1 == d.size())
    throw ConvergenceError(fmt::format("derivative maximum at grid edge h={}", h[k + 2]), 0.0);
  const double y0 = d[k - 1], y1 = d[k], y2 = d[k + 1];
  const double den = y0 - 2 * y1 + y2;
  const double off = den != 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
  return h[k + 2] + off * dh;
}

namespace {

double interp(const std::vector<double>& x, const std::vector<double>& y, double t) {
  auto it = std::upper_bound(x.begin(), x.end(), t);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const auto j = static_cast<std::size_t>(it - x.begin());
  const double w = (t - x[j - 1]) / (x[j] - x[j - 1]);
  return (1 - w) * y[j - 1] + w * y[j];
}

Curve sorted(const Curve& c) {
  if (c.x.size() != c.y.size() || c.x.empty()) throw SchemaError("malformed collapse curve");
  std::vector<std::size_t> idx(c.x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return c.x[a] < c.x[b]; });
  Curve out;
  for (auto i : idx) {
    out.x.push_back(c.x[i]);
    out.y.push_back(c.y[i]);
  }
  return out;
}

}  // namespace

double collapse_quality(const std::vector<Curve>& curves, int samples) {
  if (curves.empty()) throw SchemaError("no curves to collapse");
  if (curves.size() == 1) return 0.0;
  if (samples < 2) throw SchemaError("collapse needs at least two sample points");
  std::vector<Curve> cs;
  for (const auto& c : curves) cs.push_back(sorted(c));
  double lo = -INFINITY, hi = INFINITY;
  for (const auto& c : cs) {
    lo = std::max(lo, c.x.front());
    hi = std::min(hi, c.x.back());
  }
  if (!(lo < hi)) throw SchemaError("rescaled curves do not overlap");
  double total = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = lo + (hi - lo) * s / (samples - 1);
    double mean = 0.0, sq = 0.0;
    for (const auto& c : cs) {
      const double v = interp(c.x, c.y, t);
      mean += v;
      sq += v * v;
    }
    mean /= cs.size();
    total += sq / cs.size() - mean * mean;
  }
  return std::max(0.0, total / samples);
}

namespace {

std::vector<Curve> group_by_L(const std::vector<FssSample>& s, double eta,
                              const std::function<double(const FssSample&)>& y) {
  if (!(eta > 0.0)) throw SchemaError("eta' must be positive");
  std::map<int, Curve> by_L;
  for (const auto& p : s) {
    if (p.N <= 0 || p.L <= 0) throw SchemaError("collapse samples need positive L and N");
    auto& c = by_L[p.L];
    c.x.push_back(std::pow(double(p.L), 1.0 / eta) / p.N);
    c.y.push_back(y(p));
  }
  std::vector<Curve> out;
  for (auto& [L, c] : by_L) out.push_back(std::move(c));
  return out;
}

}  // namespace

std::vector<Curve> order_collapse_curves(const std::vector<FssSample>& s, const Exponents& e, double Delta_qed) {
  return group_by_L(s, e.eta, [&](const FssSample& p) {
    if (p.qed == 0.0) throw SchemaError("QED reference is zero");
    return std::pow(double(p.L), -(e.Delta - Delta_qed)) * p.hobm / p.qed;
  });
}

std::vector<Curve> pc_collapse_curves(const std::vector<FssSample>& s, const Exponents& e, double nu_qed) {
  if (!(e.nu > 0.0) || !(nu_qed > 0.0)) throw SchemaError("nu must be positive");
  return group_by_L(s, e.eta, [&](const FssSample& p) {
    if (p.qed == 0.0) throw SchemaError("QED reference is zero");
    return std::pow(double(p.L), -(1.0 / e.nu - 1.0 / nu_qed)) * p.hobm / p.qed;
  });
}

double interpolate_order(const std::vector<double>& h, const std::vector<double>& order, double h0) {
  if (h.size() != order.size() || h.empty()) throw SchemaError("scan arrays differ in length");
  return interp(h, order, h0);
}

std::vector<CollapseScore> collapse_scan(const std::vector<FssSample>& order_samples,
                                         const std::vector<FssSample>& pc_samples, const Exponents& nominal) {
  std::vector<CollapseScore> out;
  auto add = [&](const std::string& label, const Exponents& e) {
    CollapseScore c{label, e};
    c.order = collapse_quality(order_collapse_curves(order_samples, e));
    c.pc = collapse_quality(pc_collapse_curves(pc_samples, e));
    out.push_back(c);
  };
  add("nominal", nominal);
  for (double f : {1.5, 0.5}) {
    const std::string tag = f > 1 ? "+50%" : "-50%";
    Exponents e = nominal;
    e.Delta *= f;
    add("Delta " + tag, e);
    e = nominal;
    e.nu *= f;
    add("nu " + tag, e);
    e = nominal;
    e.eta *= f;
    add("eta " + tag, e);
  }
  return out;
}

void write_scan_csv(const std::string& path, const ScanResult& r, const ScanLabels& labels) {
  CsvWriter csv(path, {"h", "E", "L", "N", "ga"});
  for (std::size_t i = 0; i < r.h.size(); ++i)
    csv.row({r.h[i], r.order[i], double(labels.L), double(labels.N), labels.ga});
}

}  // namespace lqed
