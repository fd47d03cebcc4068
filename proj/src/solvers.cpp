#include "lqed/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <fmt/format.h>

namespace lqed {

namespace {

Vec random_unit(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(g(rng), g(rng));
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the stored basis.
void orthogonalize(const std::vector<Vec>& basis, Vec& w) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& q : basis) w -= q.dot(w) * q;
}

struct Tridiag {
  std::vector<double> a, b;  // diagonal, off-diagonal
  Eigen::MatrixXd dense() const {
    const auto m = static_cast<Eigen::Index>(a.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      T(i, i) = a[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = b[i];
    }
    return T;
  }
};

}  // namespace

GroundState ground_state(const LinearOperator& H, const LanczosOptions& opt) {
  const Eigen::Index n = H.dim;
  if (n == 0) throw SchemaError("empty operator");
  // keep the stored Krylov basis under roughly 2 GB
  const Eigen::Index budget = std::max<Eigen::Index>(8, (Eigen::Index(1) << 27) / std::max<Eigen::Index>(n, 1));
  const int m_max = static_cast<int>(std::min<Eigen::Index>({n, Eigen::Index(opt.max_basis), budget}));
  Vec x = random_unit(n, opt.seed);
  Vec w(n);
  int matvecs = 0;
  double residual = INFINITY;
  double theta = 0.0;
  while (matvecs < opt.max_matvecs) {
    std::vector<Vec> V{x};
    Tridiag T;
    Eigen::VectorXd y;
    bool done = false;
    for (int j = 0; j < m_max && matvecs < opt.max_matvecs; ++j) {
      H.apply(V[j], w);
      ++matvecs;
      const double aj = V[j].dot(w).real();
      T.a.push_back(aj);
      orthogonalize(V, w);
      const double bj = w.norm();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.dense());
      theta = es.eigenvalues()[0];
      y = es.eigenvectors().col(0);
      const double est = bj * std::abs(y[static_cast<Eigen::Index>(j)]);
      if (bj < 1e-14 * std::max(1.0, std::abs(theta)) || est < 0.1 * opt.tol ||
          j + 1 == m_max) {
        done = bj < 1e-14 * std::max(1.0, std::abs(theta)) || est < 0.1 * opt.tol;
        break;
      }
      T.b.push_back(bj);
      V.push_back(w / bj);
    }
    x.setZero();
    for (Eigen::Index k = 0; k < y.size(); ++k) x += y[k] * V[static_cast<std::size_t>(k)];
    x.normalize();
    H.apply(x, w);
    ++matvecs;
    theta = x.dot(w).real();
    residual = (w - theta * x).norm();
    if (residual < opt.tol || (done && residual < 10 * opt.tol)) {
      return {theta, x, residual, matvecs};
    }
  }
  throw ConvergenceError(fmt::format("Lanczos did not converge, residual {:.3e}", residual), residual);
}

GroundState ground_state(const SparseOp& H, const LanczosOptions& opt) {
  return ground_state(as_operator(H), opt);
}

namespace {

struct KrylovSpace {
  std::vector<Vec> V;
  Eigen::VectorXd eval;
  Eigen::MatrixXd evec;
  double beta0 = 0.0;
  double beta_last = 0.0;  // zero after a happy breakdown
};

KrylovSpace build_krylov(const LinearOperator& H, const Vec& v, int m_max) {
  KrylovSpace K;
  K.beta0 = v.norm();
  const Eigen::Index n = v.size();
  m_max = static_cast<int>(std::min<Eigen::Index>(m_max, n));
  K.V.push_back(v / K.beta0);
  Tridiag T;
  Vec w(n);
  for (int j = 0; j < m_max; ++j) {
    H.apply(K.V[j], w);
    T.a.push_back(K.V[j].dot(w).real());
    orthogonalize(K.V, w);
    const double bj = w.norm();
    const double scale = std::max(1e-300, std::abs(T.a.back()) + (T.b.empty() ? 0.0 : T.b.back()));
    if (bj < 1e-13 * scale || j + 1 == m_max) {
      K.beta_last = (bj < 1e-13 * scale) ? 0.0 : bj;
      break;
    }
    T.b.push_back(bj);
    K.V.push_back(w / bj);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T.dense());
  K.eval = es.eigenvalues();
  K.evec = es.eigenvectors();
  return K;
}

Eigen::VectorXcd small_exp_e1(const KrylovSpace& K, double dt) {
  const Eigen::Index m = K.eval.size();
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(m);
  for (Eigen::Index k = 0; k < m; ++k)
    c += K.evec.col(k).cast<cplx>() * (std::exp(cplx(0, -K.eval[k] * dt)) * K.evec(0, k));
  return c;
}

Vec assemble(const KrylovSpace& K, const Eigen::VectorXcd& c) {
  Vec out = Vec::Zero(K.V.front().size());
  for (Eigen::Index k = 0; k < c.size(); ++k) out += c[k] * K.V[static_cast<std::size_t>(k)];
  return out * K.beta0;
}

}  // namespace

Vec krylov_step(const LinearOperator& H, const Vec& v, double dt, const KrylovOptions& opt, double* err) {
  auto K = build_krylov(H, v, opt.krylov_max);
  auto c = small_exp_e1(K, dt);
  if (err) *err = K.beta_last * std::abs(c[c.size() - 1]) * K.beta0;
  return assemble(K, c);
}

void evolve(const LinearOperator& H, const Vec& psi0, const std::vector<double>& times,
            const Observer& observe, const KrylovOptions& opt) {
  if (times.empty()) return;
  Vec psi = psi0;
  double t = times.front();
  observe(0, t, psi);
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (times[k] < times[k - 1]) throw SchemaError("time grid must be non-decreasing");
    while (t < times[k]) {
      const double remaining = times[k] - t;
      auto K = build_krylov(H, psi, opt.krylov_max);
      double dt = remaining;
      int halvings = 0;
      for (;;) {
        auto c = small_exp_e1(K, dt);
        const double err = K.beta_last * std::abs(c[c.size() - 1]) * K.beta0;
        if (err <= opt.tol) {
          psi = assemble(K, c);
          break;
        }
        if (++halvings > opt.max_halvings)
          throw ConvergenceError(fmt::format("Krylov step failed at t={}", t), err);
        dt *= 0.5;
      }
      t = (dt == remaining) ? times[k] : t + dt;
    }
    observe(k, t, psi);
  }
}

std::vector<double> evolve_diagonal_observable(const LinearOperator& H, const Vec& psi0,
                                               const std::vector<double>& times, const RVec& diag,
                                               const KrylovOptions& opt) {
  std::vector<double> out(times.size());
  evolve(H, psi0, times, [&](std::size_t i, double, const Vec& psi) {
    out[i] = (psi.cwiseAbs2().array() * diag.array()).sum();
  }, opt);
  return out;
}

void evolve_timedep(const TimeDependentOperator& H, const Vec& psi0, const std::vector<double>& times,
                    const Observer& observe, const TimeDepOptions& opt) {
  if (H.is_static) {
    evolve(H.at(0.0), psi0, times, observe, opt.krylov);
    return;
  }
  if (times.empty()) return;
  Vec psi = psi0;
  double t = times.front();
  observe(0, t, psi);
  double dt_try = opt.dt_max;
  auto mid_step = [&](const Vec& v, double t0, double h) {
    return krylov_step(H.at(t0 + 0.5 * h), v, h, opt.krylov);
  };
  for (std::size_t k = 1; k < times.size(); ++k) {
    while (t < times[k]) {
      const double remaining = times[k] - t;
      double dt = dt_try > 0.0 ? std::min(dt_try, remaining) : remaining;
      for (;;) {
        Vec full = mid_step(psi, t, dt);
        Vec half = mid_step(mid_step(psi, t, 0.5 * dt), t + 0.5 * dt, 0.5 * dt);
        const double diff = (full - half).norm();
        if (diff <= opt.tol) {
          psi = std::move(half);
          break;
        }
        dt *= 0.5;
        if (dt < opt.dt_min || dt < 1e-15 * std::max(1.0, std::abs(t)))
          throw ConvergenceError(fmt::format("time step underflow at t={}", t), diff);
      }
      t = (dt >= remaining) ? times[k] : t + dt;
      if (opt.dt_max > 0.0) dt_try = std::min(opt.dt_max, 2.0 * dt);
      else dt_try = 2.0 * dt;
    }
    observe(k, t, psi);
  }
}

std::vector<double> uniform_grid(double t_max, int samples) {
  if (samples < 2) throw SchemaError("time grid needs at least two samples");
  std::vector<double> t(samples);
  for (int i = 0; i < samples; ++i) t[i] = t_max * i / (samples - 1);
  return t;
}

std::vector<double> time_average(const std::vector<double>& t, const std::vector<double>& a) {
  if (t.size() != a.size()) throw SchemaError("time and value arrays differ in length");
  std::vector<double> out(t.size());
  if (t.empty()) return out;
  double integral = 0.0;
  out[0] = a[0];
  for (std::size_t i = 1; i < t.size(); ++i) {
    integral += 0.5 * (a[i] + a[i - 1]) * (t[i] - t[i - 1]);
    const double span = t[i] - t[0];
    out[i] = span > 0.0 ? integral / span : a[i];
  }
  return out;
}

std::vector<double> trajectory_error(const std::vector<double>& t, const std::vector<double>& a,
                                     const std::vector<double>& b) {
  if (a.size() != b.size()) throw SchemaError("trajectories differ in length");
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::abs(a[i] - b[i]);
  return time_average(t, d);
}

}  // namespace lqed
