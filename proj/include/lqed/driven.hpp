#pragma once

#include <string>
#include <vector>

#include "lqed/hilbert.hpp"
#include "lqed/iontrap.hpp"

namespace lqed {

// One drive on one ion: (Omega/2) exp(-i detuning t) exp(i sum_q kappa_q x_q(t)) sigma+ + h.c.
// with x_q(t) = c_q exp(-i eps_q t) + h.c. and kappa_q = eta_{lq} M_{lq}.
struct Beam {
  int ion = 0;
  cplx Omega = 0.0;
  double detuning = 0.0;
  std::vector<double> kappa;
};

// sigma+_ion (c+)^create c^annihilate, rotating as exp(-i freq t).
struct SidebandTerm {
  int ion = 0;
  std::vector<int> create;
  std::vector<int> annihilate;
  cplx coef = 0.0;
  double freq = 0.0;
  int degree() const;
};

// All monomials with total degree <= order, with normal-ordered Lamb-Dicke
// coefficients expanded consistently to that order.
std::vector<SidebandTerm> sideband_expansion(const Beam& beam, const std::vector<double>& mode_freqs, int order);

// Validity of the second-order elimination behind the effective tunnelling.
struct CouplingValidity {
  double r1 = 0, r2 = 0, r3 = 0, r4 = 0;  // each left side over its right side
  double worst() const;
  bool ok(double factor = 1.0) const { return worst() < factor; }
};

struct EffectiveCoupling {
  cplx J = 0.0;
  CouplingValidity validity;
};

// J = sqrt(N) f g* cos^2(theta) sin(theta) [1/(4 delta) - 1/(2(delta + d_eps))].
EffectiveCoupling effective_coupling(cplx f, cplx g, double theta, double delta, double d_eps, double N);

struct StandingWave {
  double V = 0.0;
  double alpha = 0.0;
  double beta = 0.0;   // frequency correction, reabsorbed into the mode frequency
  double gamma = 0.0;
};

StandingWave standing_wave_nonlinearity(double Omega_sw, double Delta_sw, double eta_sw, double theta);

// One element (l, l+1) of the HOBM scheme; angular frequencies.
struct ElementParams {
  double Omega1 = two_pi_hz(180e3);
  double Omega2 = two_pi_hz(210e3);
  double eta = 0.08;
  double theta = 0.25;
  double delta = -two_pi_hz(50e3);
  double eps1 = two_pi_hz(5e6);
  double eps2 = two_pi_hz(5e6) + two_pi_hz(10e3);
  double N = 10;

  cplx f() const { return Omega1 * eta * eta; }
  cplx g() const { return cplx(0.0, Omega2 * eta); }
  double d_eps() const { return eps2 - eps1; }
};

struct CompensationParams {
  bool enabled = true;
  double delta1 = two_pi_hz(80e3);   // delta'
  double delta2 = two_pi_hz(120e3);  // delta''
  double mismatch = 0.0;             // fraction of the matched intensity left out
  bool absorb_constant = true;       // fold E into the laser detunings
};

// Shift of one ion: (a0 + a1 n + a2 n^2) sigma^z plus a phonon-only a_ph n,
// where n counts gauge-mode quanta.
struct IonShift {
  double a0 = 0, a1 = 0, a2 = 0, a_ph = 0;
  void add(const IonShift& o, double w = 1.0);
};

struct ShiftContribution {
  std::string label;
  int ion = 0;  // 0 or 1 within the element
  IonShift shift;
};

struct ShiftCatalog {
  std::vector<ShiftContribution> parts;
  IonShift total[2];
  // Expanded about n = N: E + F (n - N) + G (n - N)^2.
  double E[2] = {0, 0};
  double F[2] = {0, 0};
  double G[2] = {0, 0};
  double E_absorbed[2] = {0, 0};  // constant part moved into the detunings
  double Omega_c[2] = {0, 0};     // compensation Rabi frequencies
  bool empty() const { return parts.empty(); }
};

ShiftCatalog ac_stark_catalog_hobm(const ElementParams& p, const CompensationParams& c);

// H_HOBM + sum_l sum_{m in {l, l+1}} [E_m + F_m (n_l - N) + G_m (n_l - N)^2] sigma^z_m.
// Catalog entries are divided by energy_unit so they match the model parameters.
SparseOp build_hobm_simulator(const Basis& basis, const ModelParams& p, const ShiftCatalog& cat, double energy_unit);
// The shift part alone, diagonal on the basis.
RVec hobm_shift_diagonal(const Basis& basis, const ShiftCatalog& cat, double energy_unit);

// Two ions, two modes, driven as in one element; exact diagonalization in
// the static rotating frame, with the effective hop read off from the
// dressed eigenvectors.
// printed: the five-term near-resonant list with (c+)^2 weighted f cos^2 and
// f sin^2, which is what the closed-form J assumes. lamb_dicke: the weights
// from the expansion, half of those.
enum class SidebandWeights { printed, lamb_dicke };

struct TwoIonCheck {
  double J_bruteforce = 0.0;
  double J_formula = 0.0;
  // second order with lamb_dicke weights: sqrt(N) f g c^2 s [1/(4 delta) - 1/(4(delta + d_eps))]
  double J_lamb_dicke = 0.0;
  double relative_error() const;
};
TwoIonCheck two_ion_bruteforce(const ElementParams& p, int n_max_gauge, int n_max_bus,
                               SidebandWeights weights = SidebandWeights::printed);

}  // namespace lqed
