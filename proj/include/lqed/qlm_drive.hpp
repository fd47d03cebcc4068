#pragma once

#include <memory>
#include <vector>

#include "lqed/driven.hpp"
#include "lqed/hilbert.hpp"
#include "lqed/solvers.hpp"

namespace lqed {

// Axial modes of a linear Paul trap, ordered by frequency (q = 0 is COM).
struct AxialModes {
  Eigen::VectorXd freq;   // rad/s
  Eigen::MatrixXd M;      // rows ions, columns modes; dominant entry of each column positive
  Eigen::MatrixXd eta;    // eta_{lq} = eta_com sqrt(eps_1 / eps_q)
};

AxialModes axial_modes(int L, double wz, double eta_com, double mass = phys::kBe9Mass);

// How the quoted "eta_{1,1} = 3^{1/4} eta_{1,2} ~ 0.15" is read.
enum class EtaReading { eta12, eta11 };

struct QlmDriveParams {
  int L = 4;
  double wz = two_pi_hz(2e6);
  double Omega1 = two_pi_hz(150e3);
  double eta_quoted = 0.15;
  EtaReading reading = EtaReading::eta12;
  double mu = 0.0;       // mass after the quench, rad/s
  int n_max = 4;
  int order = 2;
  bool compensate = true;
  // Carrier part of the compensation: exact two-level splitting instead of
  // the second-order Delta -> Delta - Omega^2/(2 Delta).
  bool exact_carrier = false;
};

struct QlmDrive {
  QlmDriveParams params;
  AxialModes modes;
  double J = 0.0;                 // common tunnelling, rad/s
  std::vector<double> Omega;      // per ion, signed so every J_l equals J
  std::vector<double> Delta;      // -eps_l - eps_{l+1} + 2 mu
  std::vector<double> Delta_applied;  // with the carrier and phonon-independent shifts folded in
  std::vector<SidebandTerm> terms;    // frequencies refer to Delta (not Delta_applied)
};

// Mode index driven as the right partner of ion l (periodic).
inline int qlm_partner(int l, int L) { return (l + 1) % L; }

// J_l = Omega eta_{l,l} eta_{l,l+1} M_{l,l} M_{l,l+1} / 2.
double qlm_coupling(const AxialModes& m, double Omega, int l);

QlmDrive design_qlm_drive(const QlmDriveParams& p);

// Terms with |freq - mu sum(a - b)| <= cutoff, i.e. stationary in the frame
// where the phonons rotate at mu.
std::vector<SidebandTerm> stationary_reduction(const QlmDrive& d, double cutoff);

struct QlmShiftCatalog {
  std::vector<double> ls0;    // -Omega^2/(4 Delta), coefficient of sigma^z_l
  Eigen::MatrixXd E_minus;    // Omega^2 (M eta)^2 / (4 (Delta - eps))
  Eigen::MatrixXd E_plus;     // Omega^2 (M eta)^2 / (4 (Delta + eps))
  // Coefficient c_l of sigma^z_l removed by the detuning adjustment:
  // ls0 plus the phonon-independent half of the first-sideband shift.
  std::vector<double> compensated;
  double ls1_weight() const;  // sum over l, q of |E- + E+|
};

QlmShiftCatalog ac_stark_catalog_qlm(const QlmDrive& d);

// Diagonal of [include_ls0 ? H_ls0 : 0] + H_ls1 on the tensor basis, divided by unit.
RVec qlm_shift_diagonal(const Basis& basis, const QlmShiftCatalog& cat, bool include_ls0, double unit);

// Lattice on which the drive acts: ions are links, axial modes are matter sites.
LatticeSpec qlm_drive_lattice(const QlmDrive& d);

// Static-frame Hamiltonian in units of J:
//   -sum Delta_applied P_e + sum eps n + sum (term + h.c.)
// after c -> i c, which makes every coefficient real.
Eigen::MatrixXd qlm_static_hamiltonian(const QlmDrive& d, const Basis& tensor);

// Interaction-picture generator in units of J, time in units of 1/J:
//   mu sum n + sum coef exp(-i w t) sigma+ mono + h.c.,
//   w = Delta_applied - sum (eps - mu)(a - b).
TimeDependentOperator qlm_drive_generator(const QlmDrive& d, const Basis& tensor);

struct DenseSpectrum {
  RVec lambda;
  Eigen::MatrixXd U;
};

// Real symmetric eigensolver (LAPACK dsyevr); consumes H.
DenseSpectrum dense_eigensystem(Eigen::MatrixXd&& H);

// <d_k> along exp(-i H t) psi0 for each diagonal observable d_k; result[k][time].
std::vector<std::vector<double>> propagate_dense(const DenseSpectrum& s, const RVec& psi0,
                                                 const std::vector<double>& times, const std::vector<RVec>& diags);

struct FvdTrajectory {
  std::vector<double> t;          // units of 1/J
  std::vector<double> E_ideal;
  std::vector<double> E_drive;
  std::vector<double> gauss_max;  // max_i <G_i^2>
  std::vector<double> boundary;   // probability of any mode at n_max
};

// Largest tensor space propagated densely; H and U take 2 GB each at the limit.
inline constexpr std::size_t kDenseLimit = 16'000;

// Ideal bosonic QLM from |g e g e ...> with empty modes, on the Gauss sector.
std::vector<double> qlm_ideal_trajectory(int L, int n_max, const std::vector<double>& times);
// Quench under the full static-frame drive.
FvdTrajectory false_vacuum_decay(const QlmDrive& d, const std::vector<double>& times);

double rms_deviation(const std::vector<double>& a, const std::vector<double>& b);
// Half of max - min.
double oscillation_amplitude(const std::vector<double>& a);

}  // namespace lqed
