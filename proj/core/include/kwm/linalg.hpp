#pragma once

#include <complex>

#include <Eigen/Dense>

namespace kwm {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

/// Default absolute tolerance; checks scale it by (1 + ||M||_inf).
inline constexpr double kDefaultTolerance = 1e-9;

/// Maximum absolute row sum.
double inf_norm(const RealMatrix& m);
double inf_norm(const ComplexMatrix& m);

/// Largest entrywise |A - A^T| (real) or |A - A^H| (complex).
double symmetry_defect(const RealMatrix& m);
double hermitian_defect(const ComplexMatrix& m);

struct ExtremeEigenpair {
  double value = 0.0;
  ComplexVector vector;
};

/// Smallest eigenvalue of a Hermitian matrix together with a unit eigenvector.
/// Only the lower triangle is read. Throws NumericError on non-convergence.
ExtremeEigenpair min_eigenpair(const ComplexMatrix& hermitian);

/// Smallest eigenvalue of a real symmetric matrix (lower triangle read).
ExtremeEigenpair min_eigenpair(const RealMatrix& symmetric);

}  // namespace kwm
