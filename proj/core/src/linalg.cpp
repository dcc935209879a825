#include "kwm/linalg.hpp"

#include "kwm/errors.hpp"

namespace kwm {

double inf_norm(const RealMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double inf_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double symmetry_defect(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("symmetry_defect: matrix is not square");
  if (m.size() == 0) return 0.0;
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

double hermitian_defect(const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw DomainError("hermitian_defect: matrix is not square");
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

ExtremeEigenpair min_eigenpair(const ComplexMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols() || hermitian.rows() == 0) {
    throw DomainError("min_eigenpair: expected a non-empty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian);
  if (solver.info() != Eigen::Success) {
    throw NumericError("min_eigenpair: Hermitian eigensolver did not converge");
  }
  // Eigenvalues come back in increasing order.
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0)};
}

ExtremeEigenpair min_eigenpair(const RealMatrix& symmetric) {
  if (symmetric.rows() != symmetric.cols() || symmetric.rows() == 0) {
    throw DomainError("min_eigenpair: expected a non-empty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw NumericError("min_eigenpair: symmetric eigensolver did not converge");
  }
  return {solver.eigenvalues()(0), solver.eigenvectors().col(0).cast<Complex>()};
}

}  // namespace kwm
