#include "lqed/iontrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <fmt/format.h>

namespace lqed {

void TrapArray::validate() const {
  const auto n = centers.size();
  if (n == 0) throw SchemaError("trap array is empty");
  if (wx.size() != n || wy.size() != n || wz.size() != n) throw SchemaError("trap frequency tables differ in length");
  if (!(mass > 0.0)) throw SchemaError("ion mass must be positive");
  for (std::size_t i = 0; i < n; ++i)
    if (!(wx[i] > 0.0) || !(wy[i] > 0.0) || !(wz[i] > 0.0)) throw SchemaError("trap frequencies must be positive");
}

TrapArray uniform_array(int n, double spacing, double wx, double wy, double wz, double mass) {
  if (n < 1) throw SchemaError("need at least one trap");
  TrapArray t;
  t.mass = mass;
  t.wx.assign(n, wx);
  t.wy.assign(n, wy);
  t.wz.assign(n, wz);
  for (int i = 0; i < n; ++i) t.centers.push_back(i * spacing);
  return t;
}

TrapArray linear_trap(int n, double wx, double wy, double wz, double mass) {
  TrapArray t = uniform_array(n, 0.0, wx, wy, wz, mass);
  return t;
}

namespace {

struct AxialForces {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// Potential divided by the ion mass.
double axial_potential(const TrapArray& t, const Eigen::VectorXd& z) {
  const double k = phys::kCoulomb / t.mass;
  double u = 0.0;
  for (int l = 0; l < t.size(); ++l) {
    u += 0.5 * t.wz[l] * t.wz[l] * (z[l] - t.centers[l]) * (z[l] - t.centers[l]);
    for (int m = l + 1; m < t.size(); ++m) u += k / std::abs(z[l] - z[m]);
  }
  return u;
}

AxialForces axial_forces(const TrapArray& t, const Eigen::VectorXd& z) {
  const int n = t.size();
  const double k = phys::kCoulomb / t.mass;
  AxialForces f{Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(n, n)};
  for (int l = 0; l < n; ++l) {
    f.grad[l] = t.wz[l] * t.wz[l] * (z[l] - t.centers[l]);
    f.hess(l, l) = t.wz[l] * t.wz[l];
    for (int m = 0; m < n; ++m) {
      if (m == l) continue;
      const double d = z[l] - z[m];
      const double ad = std::abs(d);
      if (ad == 0.0) throw SchemaError("coincident ion positions");
      f.grad[l] -= k * d / (ad * ad * ad);
      f.hess(l, l) += 2.0 * k / (ad * ad * ad);
      f.hess(l, m) = -2.0 * k / (ad * ad * ad);
    }
  }
  return f;
}

bool ordered(const Eigen::VectorXd& z) {
  for (Eigen::Index i = 1; i < z.size(); ++i)
    if (!(z[i] > z[i - 1])) return false;
  return true;
}

}  // namespace

std::vector<double> equilibrium_positions(const TrapArray& t) {
  t.validate();
  const int n = t.size();
  if (n == 1) return {t.centers[0]};
  const double k = phys::kCoulomb / t.mass;
  const double wmin = *std::min_element(t.wz.begin(), t.wz.end());
  const double ell = std::cbrt(k / (wmin * wmin));  // natural length of a single well
  Eigen::VectorXd z(n);
  for (int l = 0; l < n; ++l) z[l] = t.centers[l];
  // spread coincident or crowded centres onto a grid of the natural length
  double min_gap = INFINITY;
  for (int l = 1; l < n; ++l) min_gap = std::min(min_gap, t.centers[l] - t.centers[l - 1]);
  if (!(min_gap > 0.5 * ell)) {
    for (int l = 0; l < n; ++l) z[l] = t.centers[l] + ell * (l - 0.5 * (n - 1));
  }
  const double scale = wmin * wmin * std::max(ell, min_gap > 0 && std::isfinite(min_gap) ? min_gap : ell);
  for (int it = 0; it < 200; ++it) {
    auto f = axial_forces(t, z);
    const double gnorm = f.grad.cwiseAbs().maxCoeff();
    if (gnorm <= 1e-12 * scale) {
      Eigen::LLT<Eigen::MatrixXd> llt(f.hess);
      if (llt.info() != Eigen::Success) throw SchemaError("equilibrium is unstable (Hessian not positive definite)");
      return {z.data(), z.data() + n};
    }
    Eigen::VectorXd step = f.hess.ldlt().solve(-f.grad);
    const double u0 = axial_potential(t, z);
    double lambda = 1.0;
    Eigen::VectorXd trial = z + step;
    while (lambda > 1e-12 && (!ordered(trial) || axial_potential(t, trial) > u0 + 1e-15 * std::abs(u0))) {
      lambda *= 0.5;
      trial = z + lambda * step;
    }
    if (lambda <= 1e-12) break;
    z = trial;
  }
  const auto f = axial_forces(t, z);
  throw ConvergenceError("equilibrium search did not converge", f.grad.cwiseAbs().maxCoeff() / scale);
}

Eigen::MatrixXd coupling_matrix(const TrapArray& t, const std::vector<double>& z, Axis axis) {
  t.validate();
  const int n = t.size();
  if (static_cast<int>(z.size()) != n) throw SchemaError("position count does not match trap count");
  const double gamma = axis == Axis::z ? -2.0 : 1.0;
  const double k = phys::kCoulomb / t.mass;
  const auto& w = t.freq(axis);
  Eigen::MatrixXd V = Eigen::MatrixXd::Zero(n, n);
  for (int l = 0; l < n; ++l) {
    double sum = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m == l) continue;
      const double d = std::abs(z[l] - z[m]);
      if (d == 0.0) throw SchemaError("coincident ion positions");
      const double c = k / (d * d * d);
      V(l, m) = gamma * c;
      sum += c;
    }
    V(l, l) = w[l] * w[l] - gamma * sum;
  }
  return V;
}

std::vector<std::string> hierarchy_violations(const DesignParams& p, double max_V_over_omega) {
  std::vector<std::string> v;
  const double r = p.hierarchy_ratio;
  if (p.blocks > 1) {
    if (p.Delta_T < r * p.Delta_B) v.push_back("Delta_T >> Delta_B");
    if (p.Delta_B < r * p.delta_T) v.push_back("Delta_B >> delta_T");
  } else if (p.Delta_T < r * p.delta_T) {
    v.push_back("Delta_T >> delta_T");
  }
  if (max_V_over_omega > 0.0) {
    if (p.Delta_T < r * max_V_over_omega) v.push_back("Delta_T >> max V / omega");
    // "~" is read as agreement within an order of magnitude
    const double ratio = p.delta_T / max_V_over_omega;
    if (ratio > 10.0 || ratio < 0.1) v.push_back("delta_T ~ max V / omega");
  }
  return v;
}

TrapArray design_frequencies(const DesignParams& p) {
  if (p.ions_per_block < 2 || p.ions_per_block % 2 != 0) throw SchemaError("ions per block must be even and >= 2");
  if (p.blocks < 1) throw SchemaError("need at least one block");
  if (p.jitter < 0.0) throw SchemaError("jitter must be non-negative");
  if (auto v = hierarchy_violations(p, 0.0); !v.empty())
    throw SchemaError(fmt::format("frequency hierarchy violated: {}", fmt::join(v, ", ")));
  const int NI = p.ions_per_block;
  const int n = p.blocks * NI;
  TrapArray t = uniform_array(n, p.spacing, p.wx, p.wy, p.wz, p.mass);
  auto stair = [&](int m, int j, int inner) {
    return m * p.Delta_B + inner * p.Delta_T + (j % 2 == 0 ? p.delta_T : 0.0);
  };
  for (int l = 1; l <= n; ++l) {
    const int mx = (l - 1) / NI, jx = (l - 1) % NI + 1;
    t.wx[l - 1] = p.wx + stair(mx, jx, (jx - 1) / 2);
    int my = 0, jy = 0;
    if (l > 1) {
      my = (l - 2) / NI;
      jy = (l - 2) % NI + 1;
    }
    t.wy[l - 1] = p.wy + stair(my, jy, (jy + 1) / 2);
  }
  if (p.jitter > 0.0) {
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> u(-p.jitter, p.jitter);
    for (int l = 0; l < n; ++l) {
      t.wx[l] += u(rng);
      t.wy[l] += u(rng);
    }
  }
  return t;
}

std::vector<std::pair<int, int>> design_pairs(int n, Axis axis) {
  std::vector<std::pair<int, int>> out;
  if (axis == Axis::z) return out;
  for (int l = axis == Axis::x ? 0 : 1; l + 1 < n; l += 2) out.emplace_back(l, l + 1);
  return out;
}

std::vector<int> hungarian(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  if (a.cols() != n) throw SchemaError("assignment needs a square cost matrix");
  // potentials method, 1-based internally
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1), v(n + 1);
  std::vector<int> p(n + 1), way(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n);
  for (int j = 1; j <= n; ++j) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

NormalModes normal_modes(const Eigen::MatrixXd& V, Axis axis, std::vector<std::pair<int, int>> pairs) {
  const auto n = V.rows();
  if (V.cols() != n || n == 0) throw SchemaError("coupling matrix must be square and non-empty");
  if ((V - V.transpose()).cwiseAbs().maxCoeff() > 1e-12 * V.cwiseAbs().maxCoeff())
    throw SchemaError("coupling matrix must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  if (es.info() != Eigen::Success) throw ConvergenceError("mode diagonalization failed", 0.0);
  if (!(es.eigenvalues()[0] > 0.0)) throw SchemaError("coupling matrix is not positive definite (unstable crystal)");
  // cost: negative overlap, with a tiny bias toward frequency order to break exact ties
  Eigen::MatrixXd cost(n, n);
  for (Eigen::Index l = 0; l < n; ++l)
    for (Eigen::Index k = 0; k < n; ++k)
      cost(l, k) = -std::abs(es.eigenvectors()(l, k)) + 1e-9 * std::abs(double(l - k)) / double(n);
  const auto assign = hungarian(cost);
  NormalModes m;
  m.axis = axis;
  m.pairs = std::move(pairs);
  m.freq.resize(n);
  m.M.resize(n, n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const int k = assign[l];
    Eigen::VectorXd col = es.eigenvectors().col(k);
    Eigen::Index imax = 0;
    col.cwiseAbs().maxCoeff(&imax);
    if (col[imax] < 0) col = -col;
    m.M.col(l) = col;
    m.freq[l] = std::sqrt(es.eigenvalues()[k]);
  }
  return m;
}

double pair_angle(const Eigen::MatrixXd& V, int l) {
  if (l < 0 || l + 1 >= V.rows()) throw SchemaError("pair index out of range");
  const double den = V(l + 1, l + 1) - V(l, l);
  if (den == 0.0) return kPi / 4;
  return 0.5 * std::atan(2.0 * V(l, l + 1) / den);
}

Eigen::MatrixXd zeroth_order_modes(const Eigen::MatrixXd& V, const std::vector<std::pair<int, int>>& pairs) {
  Eigen::MatrixXd M0 = Eigen::MatrixXd::Identity(V.rows(), V.cols());
  for (auto [a, b] : pairs) {
    if (b != a + 1) throw SchemaError("pairs must be adjacent ions");
    const double th = pair_angle(V, a);
    M0(a, a) = std::cos(th);
    M0(a, b) = std::sin(th);
    M0(b, a) = -std::sin(th);
    M0(b, b) = std::cos(th);
  }
  return M0;
}

namespace {

std::vector<int> block_of(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> b(n);
  for (int i = 0; i < n; ++i) b[i] = i;
  for (auto [a, c] : pairs) b[c] = a;
  return b;
}

double max_neighbour_coupling(const Eigen::MatrixXd& V) {
  double m = 0.0;
  for (Eigen::Index l = 0; l + 1 < V.rows(); ++l) m = std::max(m, std::abs(V(l, l + 1)));
  return m;
}

}  // namespace

PerturbativeModes perturbative_modes(const Eigen::MatrixXd& V, Axis axis, const DesignParams& p) {
  if (axis == Axis::z) throw SchemaError("perturbative modes are defined for the radial axes");
  const int n = static_cast<int>(V.rows());
  const double omega = axis == Axis::x ? p.wx : p.wy;
  const double vmax = max_neighbour_coupling(V);
  if (auto v = hierarchy_violations(p, vmax / omega); !v.empty())
    throw SchemaError(fmt::format("frequency hierarchy violated: {}", fmt::join(v, ", ")));
  const auto pairs = design_pairs(n, axis);
  const auto blk = block_of(n, pairs);
  PerturbativeModes out;
  out.M0 = zeroth_order_modes(V, pairs);
  Eigen::MatrixXd V1 = V;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (blk[a] == blk[b]) V1(a, b) = 0.0;
  Eigen::MatrixXd V0 = V - V1;
  Eigen::VectorXd lam(n);
  for (int q = 0; q < n; ++q) lam[q] = out.M0.col(q).dot(V0 * out.M0.col(q));
  // first-order Rayleigh-Schroedinger correction of each pair eigenvector
  out.M = out.M0;
  const Eigen::MatrixXd W = out.M0.transpose() * V1 * out.M0;
  for (int q = 0; q < n; ++q)
    for (int r = 0; r < n; ++r)
      if (blk[r] != blk[q]) out.M.col(q) += out.M0.col(r) * (W(r, q) / (lam[q] - lam[r]));
  out.bound_within = vmax / (p.Delta_T * omega);
  const double ni = p.ions_per_block - 1;
  out.bound_between = p.blocks > 1 ? vmax / (ni * ni * ni * p.Delta_B * omega) : 0.0;
  return out;
}

double leakout(const NormalModes& modes, const Eigen::MatrixXd& M0) {
  const int n = static_cast<int>(modes.M.rows());
  const auto blk = block_of(n, modes.pairs);
  double m = 0.0;
  for (int l = 0; l < n; ++l)
    for (int q = 0; q < n; ++q)
      if (blk[l] != blk[q]) m = std::max(m, std::abs(modes.M(l, q) - M0(l, q)));
  return m;
}

double interblock_crosstalk(const NormalModes& modes, int NI) {
  const int n = static_cast<int>(modes.M.rows());
  auto block = [&](int l) {  // 0-based ion index
    if (modes.axis == Axis::y) return l == 0 ? 0 : (l - 1) / NI;
    return l / NI;
  };
  double m = 0.0;
  for (int l = 0; l < n; ++l)
    for (int q = 0; q < n; ++q)
      if (block(l) != block(q)) m = std::max(m, std::abs(modes.M(l, q)));
  return m;
}

ArrayReport analyze_array(const DesignParams& p) {
  const TrapArray t = design_frequencies(p);
  const auto z = equilibrium_positions(t);
  ArrayReport r;
  for (Axis a : {Axis::x, Axis::y}) {
    const Eigen::MatrixXd V = coupling_matrix(t, z, a);
    const auto pairs = design_pairs(t.size(), a);
    const auto modes = normal_modes(V, a, pairs);
    const Eigen::MatrixXd M0 = zeroth_order_modes(V, pairs);
    const double omega = a == Axis::x ? p.wx : p.wy;
    const double vmax = max_neighbour_coupling(V);
    const double within = vmax / (p.Delta_T * omega);
    const double ni = p.ions_per_block - 1;
    const double between = p.blocks > 1 ? vmax / (ni * ni * ni * p.Delta_B * omega) : 0.0;
    const double leak = leakout(modes, M0);
    const double cross = interblock_crosstalk(modes, p.ions_per_block);
    if (a == Axis::x) {
      r.leak_x = leak;
      r.crosstalk_x = cross;
      r.bound_within_x = within;
      r.bound_between_x = between;
      r.bound_x = std::max(within, between);
      r.theta12 = pair_angle(V, 0);
      r.sqrtV12 = std::sqrt(V(0, 1));
    } else {
      r.leak_y = leak;
      r.crosstalk_y = cross;
      r.bound_within_y = within;
      r.bound_between_y = between;
      r.bound_y = std::max(within, between);
    }
  }
  return r;
}

}  // namespace lqed
