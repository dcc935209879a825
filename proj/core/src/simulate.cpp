#include "kwm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

namespace kwm {
namespace {

constexpr double kJitter = 1e-10;

struct LagFold {
  Lag lag;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;  // (i, j) with a_j - a_i = lag
};

std::vector<LagFold> fold_by_lag(const Group& g, std::span<const Lag> sites) {
  std::map<Lag, std::vector<std::pair<Eigen::Index, Eigen::Index>>> by_lag;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (std::size_t j = 0; j < sites.size(); ++j) {
      by_lag[g.subtract(sites[j], sites[i])].emplace_back(static_cast<Eigen::Index>(i),
                                                          static_cast<Eigen::Index>(j));
    }
  }
  std::vector<LagFold> out;
  for (auto& [lag, pairs] : by_lag) out.push_back({lag, std::move(pairs)});
  return out;
}

}  // namespace

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

GaussianStateCovariance GaussianStateCovariance::marginal(std::span<const Lag> sub) const {
  const auto d = static_cast<Eigen::Index>(2 * covariance.modes_per_site());
  std::vector<Eigen::Index> position;
  std::set<Lag> seen;
  for (Lag a : sub) {
    auto it = std::find(sites.begin(), sites.end(), a);
    if (it == sites.end()) throw DomainError("marginal: site " + std::to_string(a) + " not in window");
    if (!seen.insert(a).second) throw DomainError("marginal: duplicate site " + std::to_string(a));
    position.push_back(static_cast<Eigen::Index>(it - sites.begin()));
  }
  if (position.empty()) throw DomainError("marginal: empty sub-window");
  const auto n = static_cast<Eigen::Index>(position.size());
  RealMatrix cov(n * d, n * d);
  RealVector mu(n * d);
  for (Eigen::Index i = 0; i < n; ++i) {
    mu.segment(i * d, d) = mean.segment(position[i] * d, d);
    for (Eigen::Index j = 0; j < n; ++j) {
      cov.block(i * d, j * d, d, d) = covariance.matrix().block(position[i] * d, position[j] * d, d, d);
    }
  }
  return {std::vector<Lag>(sub.begin(), sub.end()),
          QuantumCovarianceMatrix(std::move(cov), covariance.modes_per_site(), position.size()),
          std::move(mu)};
}

GaussianStateCovariance gaussian_state_covariance(const AutocovarianceMap& k,
                                                  std::span<const Lag> sites, double tol) {
  auto block = assemble_block_matrix(k, sites);
  auto report = check_uncertainty(block, tol);
  if (!report.valid()) {
    throw ValidationFailure("gaussian_state_covariance: kernel violates the uncertainty relation on the window",
                            std::move(report));
  }
  const auto dim = block.matrix().rows();
  return {std::vector<Lag>(sites.begin(), sites.end()), std::move(block), RealVector::Zero(dim)};
}

GaussianStateCovariance displace(const GaussianStateCovariance& state, const RealVector& alpha) {
  if (alpha.size() != state.mean.size()) throw DomainError("displace: shift has the wrong length");
  GaussianStateCovariance out = state;
  out.mean -= alpha;
  return out;
}

AutocovarianceMap displaced_mixture_covariance(const AutocovarianceMap& k,
                                               const ClassicalCovarianceKernel& c) {
  // Law of total covariance: mean of the (fixed) covariances plus covariance of the means.
  return add_kernels(k, c);
}

GaussianSampler::GaussianSampler(const RealMatrix& covariance) {
  if (covariance.rows() != covariance.cols() || covariance.rows() == 0) {
    throw DomainError("GaussianSampler: covariance must be square and non-empty");
  }
  const double scale = 1.0 + covariance.diagonal().cwiseAbs().maxCoeff();
  if (symmetry_defect(covariance) > 1e-12 * scale) {
    throw DomainError("GaussianSampler: covariance is not symmetric");
  }
  Eigen::LLT<RealMatrix> llt(covariance);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  // Semidefinite covariances (e.g. boundary-valid or zero noise).
  Eigen::LDLT<RealMatrix> ldlt(covariance);
  if (ldlt.info() != Eigen::Success) throw NumericError("GaussianSampler: LDLT factorization failed");
  RealVector d = ldlt.vectorD();
  const double most_negative = std::min(0.0, d.minCoeff());
  if (most_negative < -kJitter * scale) {
    throw NumericError("GaussianSampler: covariance is not PSD within jitter (pivot " +
                       std::to_string(most_negative) + ")");
  }
  jitter_ = -most_negative;
  d = d.cwiseMax(0.0).cwiseSqrt();
  const RealMatrix l = ldlt.matrixL();
  factor_ = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
}

MonteCarloReport monte_carlo_displacement(const AutocovarianceMap& k,
                                          const ClassicalCovarianceKernel& c,
                                          std::span<const Lag> sites, std::size_t n_samples,
                                          std::uint64_t seed, double tol) {
  if (n_samples < 1000) throw DomainError("monte_carlo_displacement: need at least 1000 samples");
  const AutocovarianceMap exact = displaced_mixture_covariance(k, c);
  auto noise_report = validate_classical_kernel(c, sites, tol);
  if (!noise_report.valid()) {
    throw ValidationFailure("monte_carlo_displacement: classical kernel is not PSD on the window",
                            std::move(noise_report));
  }
  const auto state = gaussian_state_covariance(k, sites, tol);
  const GaussianSampler sampler(assemble_block_matrix(c.map(), sites).matrix());

  const Eigen::Index d = k.dim();
  const auto folds = fold_by_lag(k.group(), sites);
  const auto n_lags = static_cast<Eigen::Index>(folds.size());

  // Welford accumulators for the lag-folded products gamma_i gamma_j^T.
  RealMatrix mean = RealMatrix::Zero(d, d * n_lags);
  RealMatrix m2 = RealMatrix::Zero(d, d * n_lags);
  RealMatrix y(d, d * n_lags);
  std::size_t count = 0;
  const std::size_t batches = (n_samples + kMonteCarloBatch - 1) / kMonteCarloBatch;
  for (std::size_t b = 0; b < batches; ++b) {
    auto rng = make_stream(seed, b);
    const std::size_t draws = std::min(kMonteCarloBatch, n_samples - b * kMonteCarloBatch);
    for (std::size_t s = 0; s < draws; ++s) {
      const RealVector gamma = sampler.draw(rng);
      // The displaced state has mean -gamma; its second moment is K + gamma gamma^T.
      const RealVector shift = displace(state, gamma).mean;
      for (Eigen::Index l = 0; l < n_lags; ++l) {
        auto block = y.middleCols(l * d, d);
        block.setZero();
        for (const auto& [i, j] : folds[l].pairs) {
          block.noalias() += shift.segment(i * d, d) * shift.segment(j * d, d).transpose();
        }
        block /= static_cast<double>(folds[l].pairs.size());
      }
      ++count;
      const RealMatrix delta = y - mean;
      mean += delta / static_cast<double>(count);
      m2 += delta.cwiseProduct(y - mean);
    }
  }

  std::map<Lag, RealMatrix> empirical;
  std::map<Lag, RealMatrix> standard_error;
  MonteCarloReport report{exact, exact, {}, 0.0, 0.0, count, batches};
  for (Eigen::Index l = 0; l < n_lags; ++l) {
    const Lag lag = folds[l].lag;
    RealMatrix quantum_part = RealMatrix::Zero(d, d);
    for (const auto& [i, j] : folds[l].pairs) quantum_part += state.covariance.matrix().block(i * d, j * d, d, d);
    quantum_part /= static_cast<double>(folds[l].pairs.size());
    const RealMatrix estimate = quantum_part + mean.middleCols(l * d, d);
    const RealMatrix se = (m2.middleCols(l * d, d) / static_cast<double>(count - 1)).cwiseSqrt() /
                          std::sqrt(static_cast<double>(count));
    const RealMatrix deviation = (estimate - exact.at(lag)).cwiseAbs();
    report.max_abs_deviation = std::max(report.max_abs_deviation, deviation.maxCoeff());
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index s = 0; s < d; ++s) {
        double score = 0.0;
        if (se(r, s) > 0.0) {
          score = deviation(r, s) / se(r, s);
        } else if (deviation(r, s) > 1e-12 * (1.0 + std::fabs(exact.at(lag)(r, s)))) {
          score = std::numeric_limits<double>::infinity();
        }
        report.max_standard_score = std::max(report.max_standard_score, score);
      }
    }
    empirical.emplace(lag, estimate);
    standard_error.emplace(lag, se);
  }
  report.empirical = AutocovarianceMap(k.group(), k.modes(), std::move(empirical));
  report.standard_error = std::move(standard_error);
  return report;
}

RealMatrix sample_quadrature_process(const SpectralMeasure& marginal, std::size_t length,
                                     std::uint64_t seed, double tol) {
  if (length == 0 || length > kMaxPathLength) {
    throw DomainError("sample_quadrature_process: length must be in [1, " +
                      std::to_string(kMaxPathLength) + "]");
  }
  if (marginal.group().is_finite()) {
    throw DomainError("sample_quadrature_process: paths are indexed by Z");
  }
  auto report = validate_classical_spectrum(marginal, tol);
  if (!report.valid()) {
    throw ValidationFailure("sample_quadrature_process: marginal is not a positive conjugate-symmetric measure",
                            std::move(report));
  }
  const auto table =
      autocovariance_table(marginal, window_range(0, static_cast<Lag>(length) - 1));
  const auto k = static_cast<Eigen::Index>(marginal.dim());
  const auto n = static_cast<Eigen::Index>(length);
  RealMatrix cov(k * n, k * n);
  for (Eigen::Index s = 0; s < n; ++s) {
    for (Eigen::Index t = s; t < n; ++t) {
      const RealMatrix& block = table.at(t - s);
      cov.block(s * k, t * k, k, k) = block;
      cov.block(t * k, s * k, k, k) = block.transpose();
    }
  }
  const GaussianSampler sampler(cov);
  auto rng = make_stream(seed, 0);
  const RealVector x = sampler.draw(rng);
  return Eigen::Map<const RealMatrix>(x.data(), k, n);
}

}  // namespace kwm
