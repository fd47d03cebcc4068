#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "lqed/common.hpp"

namespace lqed {

struct GroundState {
  double energy = 0.0;
  Vec vector;
  double residual = 0.0;
  int iterations = 0;
};

struct LanczosOptions {
  double tol = 1e-10;      // on ||H x - E x||
  int max_matvecs = 20000;
  int max_basis = 120;     // restart length
  std::uint64_t seed = 0x5eed;
};

// Lowest eigenpair by explicitly restarted Lanczos with full
// reorthogonalization. Throws ConvergenceError with the last residual.
GroundState ground_state(const LinearOperator& H, const LanczosOptions& opt = {});
GroundState ground_state(const SparseOp& H, const LanczosOptions& opt = {});

struct KrylovOptions {
  double tol = 1e-10;  // estimated local error per step
  int krylov_max = 30;
  int max_halvings = 60;
};

using Observer = std::function<void(std::size_t index, double t, const Vec& psi)>;

// Propagates psi0, given at times.front(), through the (non-decreasing) grid.
void evolve(const LinearOperator& H, const Vec& psi0, const std::vector<double>& times,
            const Observer& observe, const KrylovOptions& opt = {});

// One Krylov step exp(-i H dt) v; err receives the error estimate.
Vec krylov_step(const LinearOperator& H, const Vec& v, double dt, const KrylovOptions& opt, double* err = nullptr);

std::vector<double> evolve_diagonal_observable(const LinearOperator& H, const Vec& psi0,
                                               const std::vector<double>& times, const RVec& diag,
                                               const KrylovOptions& opt = {});

// Generator of H(t). A static generator is propagated exactly by evolve().
struct TimeDependentOperator {
  Eigen::Index dim = 0;
  std::function<LinearOperator(double t)> at;
  bool is_static = false;
};

struct TimeDepOptions {
  double tol = 1e-6;        // on ||one step - two half steps||
  double dt_max = 0.0;      // 0 means the grid spacing
  double dt_min = 0.0;
  KrylovOptions krylov{1e-12, 30, 60};
};

// Exponential midpoint rule with step halving.
void evolve_timedep(const TimeDependentOperator& H, const Vec& psi0, const std::vector<double>& times,
                    const Observer& observe, const TimeDepOptions& opt = {});

std::vector<double> uniform_grid(double t_max, int samples);
// (1/t) int_0^t a, trapezoid rule; the t = 0 entry is a(0).
std::vector<double> time_average(const std::vector<double>& t, const std::vector<double>& a);
// (1/t) int_0^t |a - b|.
std::vector<double> trajectory_error(const std::vector<double>& t, const std::vector<double>& a,
                                     const std::vector<double>& b);

}  // namespace lqed
