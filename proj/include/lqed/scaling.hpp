#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lqed/hilbert.hpp"
#include "lqed/solvers.hpp"

namespace lqed {

enum class ScanFamily { qed, hobm };

// Lattice units a = 1: J = 1/2, V = g^2/2 with g = ga, mu = (mc + h) g.
struct ScanConfig {
  ScanFamily family = ScanFamily::qed;
  int L = 8;
  int N = 10;
  double ga = 0.3;
  double mc = 0.297;
  double alpha = 0.5;
  int workers = 1;
  LanczosOptions lanczos{1e-10, 20000, 120, 0x5eed};
};

struct ScanResult {
  std::vector<double> h;
  std::vector<double> order;   // <E> in the ground state
  std::vector<double> energy;
};

ModelParams coleman_params(double ga, double m_over_g);

ScanResult scan(const ScanConfig& cfg, const std::vector<double>& h_grid);

// argmax of d<E>/dh from five-point central differences, refined by a
// parabola through the three largest samples. Needs a uniform grid.
double pseudo_critical_point(const std::vector<double>& h, const std::vector<double>& order);

struct Curve {
  std::vector<double> x;
  std::vector<double> y;
};

// Mean over 100 points of the variance across curves, after piecewise-linear
// interpolation onto the common x-range.
double collapse_quality(const std::vector<Curve>& curves, int samples = 100);

struct Exponents {
  double Delta = -0.125;
  double nu = 1.0;
  double eta = 0.8;
};

struct FssSample {
  int L = 0;
  int N = 0;
  double hobm = 0.0;  // HOBM quantity at (L, N)
  double qed = 0.0;   // QED reference at L
};

// Order parameter at criticality: y = L^{-(Delta' - Delta)} E_HOBM / E_QED.
std::vector<Curve> order_collapse_curves(const std::vector<FssSample>& s, const Exponents& e,
                                         double Delta_qed = -0.125);
// Pseudo-critical point: y = L^{-(1/nu' - 1/nu)} h_HOBM / h_QED.
std::vector<Curve> pc_collapse_curves(const std::vector<FssSample>& s, const Exponents& e, double nu_qed = 1.0);

// Piecewise-linear value of order(h) at h0; h sorted.
double interpolate_order(const std::vector<double>& h, const std::vector<double>& order, double h0);

// One exponent set scored on both constructions. The sets share eta', so the
// two scores are summed.
struct CollapseScore {
  std::string label;
  Exponents e;
  double order = 0.0;  // order-parameter construction
  double pc = 0.0;     // pseudo-critical-point construction
  double joint() const { return order + pc; }
};

// Nominal set first, then each exponent scaled by 1.5 and 0.5 in turn.
// order_samples hold <E> at h = 0; pc_samples hold h_pc.
std::vector<CollapseScore> collapse_scan(const std::vector<FssSample>& order_samples,
                                         const std::vector<FssSample>& pc_samples, const Exponents& nominal);

struct ScanLabels {
  int L = 0;
  int N = 0;  // 0 for QED
  double ga = 0.0;
};

// Columns h, E, L, N, ga.
void write_scan_csv(const std::string& path, const ScanResult& r, const ScanLabels& labels);

}  // namespace lqed
