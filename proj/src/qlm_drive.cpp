#include "lqed/qlm_drive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <fmt/format.h>
#include <lapacke.h>

#include "lqed/iontrap.hpp"
#include "lqed/models.hpp"

namespace lqed {

AxialModes axial_modes(int L, double wz, double eta_com, double mass) {
  if (L < 2) throw SchemaError("the energy-lattice scheme needs at least two ions");
  if (!(wz > 0.0)) throw SchemaError("axial frequency must be positive");
  // radial confinement only has to keep the chain linear
  const TrapArray trap = linear_trap(L, 20 * wz, 20 * wz, wz, mass);
  const auto z = equilibrium_positions(trap);
  const Eigen::MatrixXd V = coupling_matrix(trap, z, Axis::z);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(V);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 0.0)
    throw SchemaError("axial coupling matrix is not positive definite");
  AxialModes m;
  m.freq = es.eigenvalues().cwiseSqrt();
  m.M = es.eigenvectors();
  for (int q = 0; q < L; ++q) {
    int k = 0;
    const double top = m.M.col(q).cwiseAbs().maxCoeff();
    while (std::abs(m.M(k, q)) < top * (1 - 1e-9)) ++k;  // first of any tied entries
    if (m.M(k, q) < 0) m.M.col(q) *= -1.0;
  }
  m.eta.resize(L, L);
  for (int l = 0; l < L; ++l)
    for (int q = 0; q < L; ++q) m.eta(l, q) = eta_com * std::sqrt(m.freq[0] / m.freq[q]);
  return m;
}

double qlm_coupling(const AxialModes& m, double Omega, int l) {
  const int L = static_cast<int>(m.freq.size());
  const int r = qlm_partner(l, L);
  return Omega * m.eta(l, l) * m.eta(l, r) * m.M(l, l) * m.M(l, r) / 2;
}

QlmDrive design_qlm_drive(const QlmDriveParams& p) {
  if (p.n_max < 2) throw SchemaError("n_max must be at least 2");
  if (p.order < 2 || p.order > 3) throw SchemaError("full-drive order must be 2 or 3");
  if (!(p.eta_quoted > 0.0)) throw SchemaError("Lamb-Dicke parameter must be positive");
  QlmDrive d;
  d.params = p;
  // eta_{1,1} / eta_{1,2} = (eps_2 / eps_1)^{1/2} = 3^{1/4}
  const double eta_com = p.reading == EtaReading::eta11 ? p.eta_quoted : p.eta_quoted * std::pow(3.0, 0.25);
  d.modes = axial_modes(p.L, p.wz, eta_com);
  const auto& eps = d.modes.freq;
  d.J = qlm_coupling(d.modes, p.Omega1, 0);
  if (std::abs(d.J) == 0.0) throw SchemaError("ion 1 has no weight on its drive modes");
  d.J = std::abs(d.J);
  const std::vector<double> epsv(eps.data(), eps.data() + eps.size());
  for (int l = 0; l < p.L; ++l) {
    const double unit = qlm_coupling(d.modes, 1.0, l);
    if (std::abs(unit) < 1e-12 * std::abs(d.J / p.Omega1)) throw SchemaError(fmt::format("ion {} sits on a mode node", l + 1));
    d.Omega.push_back(d.J / unit);
    d.Delta.push_back(-eps[l] - eps[qlm_partner(l, p.L)] + 2 * p.mu);
  }
  // the resonant term must come out as -J sigma+ c_l c_{l+1}
  for (int l = 0; l < p.L; ++l) {
    Beam b{l, d.Omega[l], d.Delta[l], {}};
    for (int q = 0; q < p.L; ++q) b.kappa.push_back(d.modes.eta(l, q) * d.modes.M(l, q));
    for (auto& t : sideband_expansion(b, epsv, p.order)) d.terms.push_back(std::move(t));
  }
  d.Delta_applied = d.Delta;
  if (p.compensate) {
    const auto cat = ac_stark_catalog_qlm(d);
    for (int l = 0; l < p.L; ++l) {
      if (!p.exact_carrier) {
        d.Delta_applied[l] += 2 * cat.compensated[l];
        continue;
      }
      // dressed splitting sqrt(D'^2 + W^2) = |D| with W the Debye-Waller reduced carrier
      double S = 0.0;
      for (int q = 0; q < p.L; ++q) S += std::pow(d.modes.eta(l, q) * d.modes.M(l, q), 2);
      const double W = d.Omega[l] * (p.order >= 2 ? 1.0 - S / 2 : 1.0);
      const double D = d.Delta[l];
      if (W * W >= D * D) throw SchemaError(fmt::format("carrier of ion {} too strong to compensate", l + 1));
      const double carrier = std::copysign(std::sqrt(D * D - W * W), D) - D;
      d.Delta_applied[l] += carrier + 2 * (cat.compensated[l] - cat.ls0[l]);
    }
  }
  return d;
}

namespace {

int net_quanta(const SidebandTerm& t) {
  int n = 0;
  for (std::size_t q = 0; q < t.create.size(); ++q) n += t.create[q] - t.annihilate[q];
  return n;
}

}  // namespace

std::vector<SidebandTerm> stationary_reduction(const QlmDrive& d, double cutoff) {
  std::vector<SidebandTerm> out;
  for (const auto& t : d.terms)
    if (std::abs(t.freq + d.params.mu * net_quanta(t)) <= cutoff) out.push_back(t);
  return out;
}

double QlmShiftCatalog::ls1_weight() const { return (E_minus + E_plus).cwiseAbs().sum(); }

QlmShiftCatalog ac_stark_catalog_qlm(const QlmDrive& d) {
  const int L = d.params.L;
  QlmShiftCatalog c;
  c.E_minus = Eigen::MatrixXd::Zero(L, L);
  c.E_plus = Eigen::MatrixXd::Zero(L, L);
  for (int l = 0; l < L; ++l) {
    const double O2 = d.Omega[l] * d.Omega[l];
    const double D = d.Delta[l];
    c.ls0.push_back(-O2 / (4 * D));
    double half = 0.0;
    for (int q = 0; q < L; ++q) {
      const double eps = d.modes.freq[q];
      const double k2 = std::pow(d.modes.M(l, q) * d.modes.eta(l, q), 2);
      if (std::abs(D - eps) < 1e-9 * eps || std::abs(D + eps) < 1e-9 * eps)
        throw SchemaError(fmt::format("ion {} is resonant with the first sideband of mode {}", l + 1, q + 1));
      c.E_minus(l, q) = O2 * k2 / (4 * (D - eps));
      c.E_plus(l, q) = O2 * k2 / (4 * (D + eps));
      half += 0.5 * (c.E_minus(l, q) + c.E_plus(l, q));
    }
    c.compensated.push_back(c.ls0[l] - half);
  }
  return c;
}

RVec qlm_shift_diagonal(const Basis& basis, const QlmShiftCatalog& cat, bool include_ls0, double unit) {
  const auto& lat = basis.lattice();
  if (lat.link.kind != LinkKind::spin_half || lat.matter != MatterKind::boson)
    throw SchemaError("QLM shifts need spin-1/2 links and boson matter");
  const int L = static_cast<int>(cat.ls0.size());
  if (lat.num_links() != L) throw SchemaError("catalog size does not match the lattice");
  const auto n = static_cast<Eigen::Index>(basis.size());
  RVec d(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto s = basis.state(static_cast<std::size_t>(r));
    double acc = 0.0;
    for (int l = 0; l < L; ++l) {
      const double sz = s.links[l] ? 1.0 : -1.0;
      double w = include_ls0 ? cat.ls0[l] : 0.0;
      for (int q = 0; q < L; ++q) w -= (cat.E_minus(l, q) + cat.E_plus(l, q)) * s.matter[q];
      acc += w * sz;
    }
    d[r] = acc / unit;
  }
  return d;
}

LatticeSpec qlm_drive_lattice(const QlmDrive& d) {
  return qlm_lattice(d.params.L, MatterKind::boson, d.params.n_max);
}

namespace {

// Target of sigma+_l mono on s, with the bosonic matrix element; nullopt if
// it leaves the truncated space or the ion is already excited.
std::optional<std::pair<BasisState, double>> apply_term(const SidebandTerm& t, const BasisState& s, int n_max) {
  if (s.links[t.ion] != 0) return std::nullopt;
  BasisState u = s;
  u.links[t.ion] = 1;
  double amp = 1.0;
  for (std::size_t q = 0; q < t.create.size(); ++q) {
    int n = s.matter[q];
    for (int k = 0; k < t.annihilate[q]; ++k) {
      if (n == 0) return std::nullopt;
      amp *= std::sqrt(double(n));
      --n;
    }
    for (int k = 0; k < t.create[q]; ++k) {
      if (n == n_max) return std::nullopt;
      ++n;
      amp *= std::sqrt(double(n));
    }
    u.matter[q] = n;
  }
  return std::make_pair(std::move(u), amp);
}

void check_basis(const QlmDrive& d, const Basis& b) {
  const auto& lat = b.lattice();
  if (lat.L != d.params.L || lat.link.kind != LinkKind::spin_half || lat.matter != MatterKind::boson ||
      lat.matter_max != d.params.n_max)
    throw SchemaError("basis does not match the drive lattice");
}

}  // namespace

Eigen::MatrixXd qlm_static_hamiltonian(const QlmDrive& d, const Basis& tensor) {
  check_basis(d, tensor);
  const int L = d.params.L;
  const auto n = static_cast<Eigen::Index>(tensor.size());
  const double J = d.J;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto s = tensor.state(static_cast<std::size_t>(r));
    double diag = 0.0;
    for (int l = 0; l < L; ++l) diag -= d.Delta_applied[l] * s.links[l];
    for (int q = 0; q < L; ++q) diag += d.modes.freq[q] * s.matter[q];
    H(r, r) = diag / J;
    for (const auto& t : d.terms) {
      auto hit = apply_term(t, s, d.params.n_max);
      if (!hit) continue;
      const auto c = tensor.find(hit->first);
      if (!c) continue;
      int b = 0, a = 0;
      for (std::size_t q = 0; q < t.create.size(); ++q) {
        a += t.create[q];
        b += t.annihilate[q];
      }
      // c -> i c maps i^{a+b} onto (-1)^b
      const cplx w = t.coef * std::pow(cplx(0, 1), -(a + b)) * ((b % 2) ? -1.0 : 1.0);
      if (std::abs(w.imag()) > 1e-12 * std::abs(w) + 1e-300)
        throw SchemaError("drive coefficients must be real up to the sideband phase");
      const auto col = static_cast<Eigen::Index>(*c);
      H(col, r) += w.real() * hit->second / J;
      H(r, col) += w.real() * hit->second / J;
    }
  }
  return H;
}

TimeDependentOperator qlm_drive_generator(const QlmDrive& d, const Basis& tensor) {
  check_basis(d, tensor);
  const auto n = static_cast<Eigen::Index>(tensor.size());
  const double J = d.J, mu = d.params.mu;
  struct Piece {
    double w;
    SparseOp A;
    SparseOp Ad;
  };
  auto pieces = std::make_shared<std::vector<Piece>>();
  auto number = std::make_shared<RVec>(RVec::Zero(n));
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto s = tensor.state(static_cast<std::size_t>(r));
    (*number)[r] = mu / J * std::accumulate(s.matter.begin(), s.matter.end(), 0);
  }
  for (const auto& t : d.terms) {
    std::vector<Eigen::Triplet<cplx>> trip;
    for (Eigen::Index r = 0; r < n; ++r) {
      auto hit = apply_term(t, tensor.state(static_cast<std::size_t>(r)), d.params.n_max);
      if (!hit) continue;
      if (auto c = tensor.find(hit->first)) trip.emplace_back(static_cast<Eigen::Index>(*c), r, t.coef * hit->second / J);
    }
    if (trip.empty()) continue;
    Piece p;
    // shift from Delta to Delta_applied, then to the frame where phonons rotate at mu
    p.w = (t.freq + d.Delta_applied[t.ion] - d.Delta[t.ion] + mu * net_quanta(t)) / J;
    p.A.resize(n, n);
    p.A.setFromTriplets(trip.begin(), trip.end());
    p.Ad = p.A.adjoint();
    pieces->push_back(std::move(p));
  }
  TimeDependentOperator op;
  op.dim = n;
  op.is_static = false;
  op.at = [pieces, number, n](double t) {
    return LinearOperator{n, [pieces, number, t](const Vec& x, Vec& y) {
                            y = (number->array().cast<cplx>() * x.array()).matrix();
                            for (const auto& p : *pieces) {
                              const cplx ph = std::exp(cplx(0, -p.w * t));
                              y.noalias() += ph * (p.A * x);
                              y.noalias() += std::conj(ph) * (p.Ad * x);
                            }
                          }};
  };
  return op;
}

DenseSpectrum dense_eigensystem(Eigen::MatrixXd&& H) {
  const auto n = static_cast<lapack_int>(H.rows());
  if (H.cols() != H.rows()) throw SchemaError("dense eigensystem needs a square matrix");
  DenseSpectrum s;
  s.lambda.resize(n);
  s.U.resize(n, n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'A', 'L', n, H.data(), n, 0.0, 0.0, 0, 0, 0.0,
                                         &found, s.lambda.data(), s.U.data(), n, support.data());
  H.resize(0, 0);
  if (info != 0 || found != n) throw ConvergenceError(fmt::format("dsyevr failed (info {})", info), double(info));
  return s;
}

std::vector<std::vector<double>> propagate_dense(const DenseSpectrum& s, const RVec& psi0,
                                                 const std::vector<double>& times, const std::vector<RVec>& diags) {
  const auto n = s.lambda.size();
  if (psi0.size() != n) throw SchemaError("state dimension does not match the spectrum");
  for (const auto& d : diags)
    if (d.size() != n) throw SchemaError("observable dimension does not match the spectrum");
  const RVec c = s.U.transpose() * psi0;
  std::vector<std::vector<double>> out(diags.size(), std::vector<double>(times.size()));
  const std::size_t block = 64;
  for (std::size_t start = 0; start < times.size(); start += block) {
    const auto B = static_cast<Eigen::Index>(std::min(block, times.size() - start));
    Eigen::MatrixXd C(n, B), S(n, B);
    for (Eigen::Index k = 0; k < B; ++k) {
      const double t = times[start + k];
      C.col(k) = c.array() * (s.lambda.array() * t).cos();
      S.col(k) = c.array() * (s.lambda.array() * t).sin();
    }
    const Eigen::MatrixXd re = s.U * C;
    const Eigen::MatrixXd im = s.U * S;
    const Eigen::MatrixXd prob = re.cwiseAbs2() + im.cwiseAbs2();
    for (std::size_t j = 0; j < diags.size(); ++j) {
      const RVec v = prob.transpose() * diags[j];
      for (Eigen::Index k = 0; k < B; ++k) out[j][start + k] = v[k];
    }
  }
  return out;
}

std::vector<double> qlm_ideal_trajectory(int L, int n_max, const std::vector<double>& times) {
  const auto lat = qlm_lattice(L, MatterKind::boson, n_max);
  const Basis basis = enumerate_gauge_sector(lat);
  const SparseOp H = build_qlm(basis, {1.0, 0.0, 0.0}, ModelFamily::qlm_boson);
  const Vec psi0 = product_state(basis, false_vacuum_configuration(lat));
  KrylovOptions opt;
  opt.tol = 1e-12;
  return evolve_diagonal_observable(as_operator(H), psi0, times, electric_observable(basis), opt);
}

FvdTrajectory false_vacuum_decay(const QlmDrive& d, const std::vector<double>& times) {
  const auto lat = qlm_drive_lattice(d);
  const Basis tensor = enumerate_tensor_basis(lat);
  const auto n = static_cast<Eigen::Index>(tensor.size());
  if (tensor.size() > kDenseLimit)
    throw CapacityError(fmt::format("{} states exceed the dense propagation limit {}", tensor.size(), kDenseLimit));
  RVec psi0 = RVec::Zero(n);
  psi0[static_cast<Eigen::Index>(*tensor.find(false_vacuum_configuration(lat)))] = 1.0;
  std::vector<RVec> diags;
  diags.push_back(electric_observable(tensor));
  const int sites = lat.num_constrained_sites();
  for (int i = 0; i < sites; ++i) diags.emplace_back(n);
  RVec edge(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto s = tensor.state(static_cast<std::size_t>(r));
    const auto g = gauss_values(lat, s);
    for (int i = 0; i < sites; ++i) diags[1 + i][r] = g[i] * g[i];
    edge[r] = std::any_of(s.matter.begin(), s.matter.end(), [&](int m) { return m == d.params.n_max; }) ? 1.0 : 0.0;
  }
  diags.push_back(edge);
  const auto spec = dense_eigensystem(qlm_static_hamiltonian(d, tensor));
  const auto obs = propagate_dense(spec, psi0, times, diags);
  FvdTrajectory tr;
  tr.t = times;
  tr.E_drive = obs[0];
  tr.boundary = obs.back();
  tr.gauss_max.assign(times.size(), 0.0);
  for (int i = 0; i < sites; ++i)
    for (std::size_t k = 0; k < times.size(); ++k) tr.gauss_max[k] = std::max(tr.gauss_max[k], obs[1 + i][k]);
  tr.E_ideal = qlm_ideal_trajectory(d.params.L, d.params.n_max, times);
  return tr;
}

double rms_deviation(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.empty()) throw SchemaError("RMS needs equal, non-empty series");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / a.size());
}

double oscillation_amplitude(const std::vector<double>& a) {
  if (a.empty()) throw SchemaError("empty series");
  const auto [lo, hi] = std::minmax_element(a.begin(), a.end());
  return 0.5 * (*hi - *lo);
}

}  // namespace lqed
