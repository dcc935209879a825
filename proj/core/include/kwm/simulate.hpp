#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <vector>

#include "kwm/errors.hpp"
#include "kwm/kernels.hpp"
#include "kwm/linalg.hpp"
#include "kwm/report.hpp"
#include "kwm/spectra.hpp"
#include "kwm/symplectic.hpp"

namespace kwm {

/// Raised when an input fails the validation a constructor requires; the
/// report explains why.
class ValidationFailure : public DomainError {
 public:
  ValidationFailure(const std::string& what, ValidationReport report)
      : DomainError(what), report_(std::move(report)) {}
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Mean and covariance of the Gaussian state on a window of sites.
struct GaussianStateCovariance {
  std::vector<Lag> sites;
  QuantumCovarianceMatrix covariance;
  RealVector mean;

  /// The state restricted to `sub`, a subset of `sites` in any order.
  GaussianStateCovariance marginal(std::span<const Lag> sub) const;
};

/// Mean-zero Gaussian state with covariance [[K(a_j - a_i)]]. Throws
/// ValidationFailure when K is not a quantum covariance kernel on the window.
GaussianStateCovariance gaussian_state_covariance(const AutocovarianceMap& k,
                                                  std::span<const Lag> sites,
                                                  double tol = kDefaultTolerance);

/// Applies a Weyl displacement that shifts every quadrature by -alpha; the
/// covariance is unchanged.
GaussianStateCovariance displace(const GaussianStateCovariance& state, const RealVector& alpha);

/// Covariance of the random-displacement mixture: K + C.
AutocovarianceMap displaced_mixture_covariance(const AutocovarianceMap& k,
                                               const ClassicalCovarianceKernel& c);

/// Classical noise driving the random displacements. The quadrature shift
/// alpha_a = (x_a1, y_a1, ..., x_ak, y_ak) is stored directly.
struct DisplacementNoiseModel {
  ClassicalCovarianceKernel noise;
  std::uint64_t seed = 0;
};

/// Draws mean-zero Gaussian vectors with a given covariance. Factorizes with
/// LLT; semidefinite input falls back to a pivoted LDLT whose pivots down to
/// -1e-10 * (1 + max diag) are clamped to zero (NumericError below that).
class GaussianSampler {
 public:
  explicit GaussianSampler(const RealMatrix& covariance);

  Eigen::Index dim() const noexcept { return factor_.rows(); }
  /// factor * factor^T reproduces the covariance (up to jitter).
  const RealMatrix& factor() const noexcept { return factor_; }
  double jitter() const noexcept { return jitter_; }

  template <class Rng>
  RealVector draw(Rng& rng) const;

 private:
  RealMatrix factor_;
  double jitter_ = 0.0;
};

struct MonteCarloReport {
  AutocovarianceMap empirical;
  AutocovarianceMap exact;
  /// CLT standard error of every empirical lag entry.
  std::map<Lag, RealMatrix> standard_error;
  double max_abs_deviation = 0.0;
  /// Largest |empirical - exact| / standard error (0 when both vanish).
  double max_standard_score = 0.0;
  std::size_t samples = 0;
  std::size_t batches = 0;

  /// Every entry within `factor` standard errors.
  bool within(double factor) const noexcept { return max_standard_score <= factor; }
};

inline constexpr std::size_t kMonteCarloBatch = 8192;

/// Samples gamma ~ N(0, [[C(a_j - a_i)]]) on the window; each draw contributes
/// the displaced state with mean -gamma and covariance [[K]]. The averaged
/// second moments, folded by lag, estimate K + C. Batch b draws from its own
/// stream seeded by (seed, b), so output depends only on (seed, n_samples).
MonteCarloReport monte_carlo_displacement(const AutocovarianceMap& k,
                                          const ClassicalCovarianceKernel& c,
                                          std::span<const Lag> sites, std::size_t n_samples,
                                          std::uint64_t seed, double tol = kDefaultTolerance);

inline constexpr std::size_t kMaxPathLength = 4096;

/// Mean-zero Gaussian paths of a classical stationary process with matrix
/// spectrum `marginal` (k x k pieces): returns k x length samples built from the
/// block-Toeplitz covariance [[K(t - s)]].
RealMatrix sample_quadrature_process(const SpectralMeasure& marginal, std::size_t length,
                                     std::uint64_t seed, double tol = kDefaultTolerance);

/// Deterministic generator used by every sampler here.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);

template <class Rng>
RealVector GaussianSampler::draw(Rng& rng) const {
  std::normal_distribution<double> normal;
  RealVector z(factor_.cols());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return factor_ * z;
}

}  // namespace kwm
