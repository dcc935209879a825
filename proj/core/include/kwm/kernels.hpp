#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "kwm/groups.hpp"
#include "kwm/linalg.hpp"
#include "kwm/report.hpp"
#include "kwm/symplectic.hpp"

namespace kwm {

/// Lag-indexed real 2k x 2k matrices K(a) with K(-a) = K(a)^T; the covariance of
/// sites a and b is K(b - a). Lags missing from the table are zero.
class AutocovarianceMap {
 public:
  /// Builds the table from `lags`. A lag whose mirror -a is absent gets K(a)^T
  /// filled in; present mirrors must agree with the transpose to 1e-12 (relative),
  /// otherwise DomainError. Labels are interpreted in `group` and must be canonical.
  AutocovarianceMap(Group group, std::size_t modes, std::map<Lag, RealMatrix> lags);

  /// White kernel: K(0) = `at_zero`, zero elsewhere.
  static AutocovarianceMap white(Group group, std::size_t modes, const RealMatrix& at_zero);

  const Group& group() const noexcept { return group_; }
  std::size_t modes() const noexcept { return modes_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(2 * modes_); }

  /// K(a); zero for unlisted lags.
  RealMatrix at(Lag a) const;
  const std::map<Lag, RealMatrix>& table() const noexcept { return lags_; }
  /// Largest |a| among stored non-zero lags (Z) or the group order minus one.
  std::int64_t support_radius() const;

 private:
  Group group_;
  std::size_t modes_;
  std::map<Lag, RealMatrix> lags_;
};

/// Same shape as an autocovariance map; block matrices over windows are PSD.
class ClassicalCovarianceKernel {
 public:
  explicit ClassicalCovarianceKernel(AutocovarianceMap map) : map_(std::move(map)) {}
  static ClassicalCovarianceKernel zero(Group group, std::size_t modes);

  const AutocovarianceMap& map() const noexcept { return map_; }

 private:
  AutocovarianceMap map_;
};

/// Inclusive range first..last as a window.
std::vector<Lag> window_range(Lag first, Lag last);

/// [[K(a_j - a_i)]] over the window; (i, j) block is K(a_j - a_i).
/// Throws DomainError on duplicate or out-of-range sites.
QuantumCovarianceMatrix assemble_block_matrix(const AutocovarianceMap& k,
                                              std::span<const Lag> sites);

/// [[L(a_j - a_i)]] with L(a) = K(a) + (i/2) 1_{a=0} J_{2k}.
ComplexMatrix augmented_kernel_matrix(const AutocovarianceMap& k, std::span<const Lag> sites);

/// Runs check_uncertainty on the assembled block matrix. The verdict only
/// speaks for this window.
ValidationReport validate_quantum_kernel(const AutocovarianceMap& k, std::span<const Lag> sites,
                                         double tol = kDefaultTolerance);

/// PSD check of the assembled block matrix without the symplectic term.
ValidationReport validate_classical_kernel(const ClassicalCovarianceKernel& c,
                                           std::span<const Lag> sites,
                                           double tol = kDefaultTolerance);

/// Lagwise sum K + C. Throws DomainError when groups or mode counts differ.
AutocovarianceMap add_kernels(const AutocovarianceMap& k, const ClassicalCovarianceKernel& c);

}  // namespace kwm
