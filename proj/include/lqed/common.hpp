#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace lqed {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using SparseOp = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Hard ceiling on any enumerated Hilbert space.
inline constexpr std::size_t kDimensionCap = 20'000'000;

// Exit codes follow the CLI contract: 2 schema, 3 capacity, 4 convergence.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct CapacityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

// Matrix-free Hermitian operator: y = A x.
struct LinearOperator {
  Eigen::Index dim = 0;
  std::function<void(const Vec&, Vec&)> apply;
};

inline LinearOperator as_operator(const SparseOp& H) {
  return {H.rows(), [&H](const Vec& x, Vec& y) { y.noalias() = H * x; }};
}

}  // namespace lqed
