#pragma once

#include <cstddef>

#include "kwm/linalg.hpp"
#include "kwm/report.hpp"

namespace kwm {

/// J_{2k}: k diagonal copies of [[0, 1], [-1, 0]]. Quadratures are ordered
/// (q_1, p_1, ..., q_k, p_k) per site, sites concatenated.
struct SymplecticForm {
  std::size_t modes = 0;
  RealMatrix matrix;
};

SymplecticForm symplectic_form(std::size_t modes);

/// Real symmetric 2kn x 2kn covariance of k modes at each of n sites.
class QuantumCovarianceMatrix {
 public:
  /// Throws DomainError when the shape is not 2kn x 2kn or the matrix is not
  /// symmetric within 1e-12 * (1 + ||M||_inf).
  QuantumCovarianceMatrix(RealMatrix matrix, std::size_t modes_per_site, std::size_t sites = 1);

  const RealMatrix& matrix() const noexcept { return matrix_; }
  std::size_t modes_per_site() const noexcept { return modes_; }
  std::size_t sites() const noexcept { return sites_; }
  std::size_t total_modes() const noexcept { return modes_ * sites_; }

 private:
  RealMatrix matrix_;
  std::size_t modes_;
  std::size_t sites_;
};

/// M + (i/2) J_{2kn} as a complex Hermitian matrix.
ComplexMatrix uncertainty_matrix(const QuantumCovarianceMatrix& m);

/// Tests M + (i/2) J >= 0. Valid iff the smallest eigenvalue is at least
/// -tol * (1 + ||M||_inf); an invalid report carries the eigenvector of the
/// most negative eigenvalue as certificate.
ValidationReport check_uncertainty(const QuantumCovarianceMatrix& m,
                                   double tol = kDefaultTolerance);

/// Shared PSD test used by every validator: threshold = tol * (1 + scale).
ValidationReport check_hermitian_psd(const ComplexMatrix& h, double scale, double tol);

struct PurityCheck {
  bool ok = true;
  double determinant = 0.0;
  double bound = 0.0;
};

/// det Re F >= 4^{-k} - tol for a Hermitian 2k x 2k matrix F.
PurityCheck purity_determinant_check(const ComplexMatrix& f, std::size_t modes,
                                     double tol = kDefaultTolerance);

}  // namespace kwm
