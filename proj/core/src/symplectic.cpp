#include "kwm/symplectic.hpp"

#include <cmath>
#include <string>

#include "kwm/errors.hpp"

namespace kwm {

const char* to_string(Verdict v) noexcept { return v == Verdict::Valid ? "valid" : "invalid"; }

SymplecticForm symplectic_form(std::size_t modes) {
  if (modes == 0) throw DomainError("symplectic_form: need at least one mode");
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  RealMatrix j = RealMatrix::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; r += 2) {
    j(r, r + 1) = 1.0;
    j(r + 1, r) = -1.0;
  }
  return {modes, std::move(j)};
}

QuantumCovarianceMatrix::QuantumCovarianceMatrix(RealMatrix matrix, std::size_t modes_per_site,
                                                 std::size_t sites)
    : matrix_(std::move(matrix)), modes_(modes_per_site), sites_(sites) {
  if (modes_ == 0 || sites_ == 0) {
    throw DomainError("QuantumCovarianceMatrix: modes and sites must be positive");
  }
  const auto dim = static_cast<Eigen::Index>(2 * modes_ * sites_);
  if (matrix_.rows() != dim || matrix_.cols() != dim) {
    throw DomainError("QuantumCovarianceMatrix: expected " + std::to_string(dim) + "x" +
                      std::to_string(dim) + ", got " + std::to_string(matrix_.rows()) + "x" +
                      std::to_string(matrix_.cols()));
  }
  if (!matrix_.allFinite()) throw DomainError("QuantumCovarianceMatrix: non-finite entry");
  if (symmetry_defect(matrix_) > 1e-12 * (1.0 + inf_norm(matrix_))) {
    throw DomainError("QuantumCovarianceMatrix: matrix is not symmetric");
  }
}

ComplexMatrix uncertainty_matrix(const QuantumCovarianceMatrix& m) {
  const RealMatrix j = symplectic_form(m.total_modes()).matrix;
  ComplexMatrix h(m.matrix().rows(), m.matrix().cols());
  h.real() = m.matrix();
  h.imag() = 0.5 * j;
  return h;
}

ValidationReport check_hermitian_psd(const ComplexMatrix& h, double scale, double tol) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  const auto eig = min_eigenpair(h);
  ValidationReport report;
  report.min_eigenvalue = eig.value;
  report.threshold = tol * (1.0 + scale);
  report.margin = eig.value + report.threshold;
  report.verdict = report.margin >= 0.0 ? Verdict::Valid : Verdict::Invalid;
  if (!report.valid()) report.certificate = eig.vector;
  return report;
}

ValidationReport check_uncertainty(const QuantumCovarianceMatrix& m, double tol) {
  auto report = check_hermitian_psd(uncertainty_matrix(m), inf_norm(m.matrix()), tol);
  report.details.push_back({"uncertainty", report.valid(), report.min_eigenvalue,
                            "M + (i/2)J >= 0 over " + std::to_string(m.sites()) + " site(s)"});
  return report;
}

PurityCheck purity_determinant_check(const ComplexMatrix& f, std::size_t modes, double tol) {
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  if (modes == 0 || f.rows() != dim || f.cols() != dim) {
    throw DomainError("purity_determinant_check: expected a 2k x 2k matrix");
  }
  if (hermitian_defect(f) > 1e-12 * (1.0 + inf_norm(f)) + tol) {
    throw DomainError("purity_determinant_check: matrix is not Hermitian");
  }
  PurityCheck out;
  out.determinant = f.real().determinant();
  out.bound = std::pow(0.25, static_cast<double>(modes));
  out.ok = out.determinant >= out.bound - tol;
  return out;
}

}  // namespace kwm
