#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "lqed/common.hpp"

namespace lqed {

namespace phys {
inline constexpr double kElementaryCharge = 1.602176634e-19;   // C
inline constexpr double kEpsilon0 = 8.8541878128e-12;          // F/m
inline constexpr double kAtomicMass = 1.66053906660e-27;       // kg
inline constexpr double kHbar = 1.054571817e-34;               // J s
inline constexpr double kCoulomb = kElementaryCharge * kElementaryCharge / (4.0 * kPi * kEpsilon0);  // J m
inline constexpr double kBe9Mass = 9.0122 * kAtomicMass;
}  // namespace phys

inline constexpr double two_pi_hz(double f) { return kTwoPi * f; }

enum class Axis { x, y, z };

// Frequencies are angular (rad/s); positions in metres.
struct TrapArray {
  double mass = phys::kBe9Mass;
  std::vector<double> wx, wy, wz;
  std::vector<double> centers;

  int size() const { return static_cast<int>(centers.size()); }
  const std::vector<double>& freq(Axis a) const { return a == Axis::x ? wx : a == Axis::y ? wy : wz; }
  void validate() const;
};

// Equally spaced micro-traps with uniform frequencies.
TrapArray uniform_array(int n, double spacing, double wx, double wy, double wz, double mass = phys::kBe9Mass);
// All ions in one harmonic well (linear Paul trap).
TrapArray linear_trap(int n, double wx, double wy, double wz, double mass = phys::kBe9Mass);

// Damped Newton on the axial potential. Throws ConvergenceError, or
// SchemaError if the Hessian at the solution is not positive definite.
std::vector<double> equilibrium_positions(const TrapArray& traps);

Eigen::MatrixXd coupling_matrix(const TrapArray& traps, const std::vector<double>& z, Axis axis);

struct DesignParams {
  int blocks = 1;
  int ions_per_block = 6;      // N_I, even
  double wx = two_pi_hz(5e6);
  double wy = two_pi_hz(5e6);
  double wz = two_pi_hz(0.5e6);
  double Delta_T = two_pi_hz(500e3);
  double Delta_B = two_pi_hz(50e3);
  double delta_T = two_pi_hz(5e3);
  double spacing = 30e-6;
  double mass = phys::kBe9Mass;
  double jitter = 0.0;         // half-width of the uniform per-trap offset
  std::uint64_t seed = 0;
  double hierarchy_ratio = 5.0;  // minimum ratio accepted for each "much greater than"
};

// Staircase design of the radial frequencies, blocks offset by Delta_B.
TrapArray design_frequencies(const DesignParams& p);

// Checks Delta_T >> Delta_B >> delta_T ~ max V/omega; empty when satisfied.
std::vector<std::string> hierarchy_violations(const DesignParams& p, double max_V_over_omega);

// Near-resonant pairs, 0-based: x pairs ions (1,2),(3,4),...; y pairs (2,3),(4,5),...
std::vector<std::pair<int, int>> design_pairs(int n, Axis axis);

struct NormalModes {
  Axis axis = Axis::x;
  Eigen::VectorXd freq;   // epsilon_q, rad/s
  Eigen::MatrixXd M;      // rows ions, columns modes
  std::vector<std::pair<int, int>> pairs;
};

// Dense eigendecomposition. Column q is matched to ion q by maximal total
// overlap and signed so its dominant entry is positive. Throws SchemaError
// if V is not positive definite.
NormalModes normal_modes(const Eigen::MatrixXd& V, Axis axis, std::vector<std::pair<int, int>> pairs = {});

// theta = 1/2 arctan(2 V_{l,l+1} / (V_{l+1,l+1} - V_{l,l})), pi/4 for equal diagonals.
// l is 0-based and names the first ion of the pair.
double pair_angle(const Eigen::MatrixXd& V, int l);

// Block-diagonal zeroth-order matrix built from the pair rotations.
Eigen::MatrixXd zeroth_order_modes(const Eigen::MatrixXd& V, const std::vector<std::pair<int, int>>& pairs);

struct PerturbativeModes {
  Eigen::MatrixXd M0;
  Eigen::MatrixXd M;        // M0 plus first-order corrections from off-pair couplings
  double bound_within = 0;  // max V_{l,l+1} / (Delta_T omega)
  double bound_between = 0; // max V_{l,l+1} / ((N_I - 1)^3 Delta_B omega)
  double bound() const { return std::max(bound_within, bound_between); }
};

PerturbativeModes perturbative_modes(const Eigen::MatrixXd& V, Axis axis, const DesignParams& p);

// max |M - M0| outside the pair blocks.
double leakout(const NormalModes& modes, const Eigen::MatrixXd& M0);
// max |M_{lq}| with ion l and mode q in different blocks.
double interblock_crosstalk(const NormalModes& modes, int ions_per_block);

struct ArrayReport {
  double leak_x = 0, leak_y = 0;
  double crosstalk_x = 0, crosstalk_y = 0;
  double bound_x = 0, bound_y = 0;
  double bound_within_x = 0, bound_within_y = 0;
  double bound_between_x = 0, bound_between_y = 0;
  double theta12 = 0;
  double sqrtV12 = 0;        // sqrt(V^x_{12}), rad/s
  double leak() const { return std::max(leak_x, leak_y); }
  double bound() const { return std::max(bound_x, bound_y); }
};

// Designs the array, solves equilibrium and modes on both radial axes.
ArrayReport analyze_array(const DesignParams& p);

// Minimum-cost perfect matching, rows to columns (square cost matrix).
std::vector<int> hungarian(const Eigen::MatrixXd& cost);

}  // namespace lqed
