#include "kwm/kernels.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <string>

#include "kwm/errors.hpp"

namespace kwm {
namespace {

constexpr double kTransposeTolerance = 1e-12;

void check_window(const Group& group, std::span<const Lag> sites) {
  if (sites.empty()) throw DomainError("window must contain at least one site");
  std::set<Lag> seen;
  for (Lag a : sites) {
    if (!group.contains(a)) {
      throw DomainError("window site " + std::to_string(a) + " is not a canonical group element");
    }
    if (!seen.insert(a).second) throw DomainError("duplicate window site " + std::to_string(a));
  }
}

}  // namespace

AutocovarianceMap::AutocovarianceMap(Group group, std::size_t modes,
                                     std::map<Lag, RealMatrix> lags)
    : group_(std::move(group)), modes_(modes), lags_(std::move(lags)) {
  if (modes_ == 0) throw DomainError("AutocovarianceMap: need at least one mode");
  const Eigen::Index d = dim();
  for (const auto& [a, m] : lags_) {
    if (!group_.contains(a)) {
      throw DomainError("AutocovarianceMap: lag " + std::to_string(a) + " outside the group");
    }
    if (m.rows() != d || m.cols() != d) {
      throw DomainError("AutocovarianceMap: lag " + std::to_string(a) + " has shape " +
                        std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                        ", expected " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!m.allFinite()) throw DomainError("AutocovarianceMap: non-finite entry");
  }
  std::map<Lag, RealMatrix> mirrors;
  for (const auto& [a, m] : lags_) {
    const Lag neg = group_.negate(a);
    auto it = lags_.find(neg);
    if (it == lags_.end()) {
      mirrors.emplace(neg, m.transpose());
      continue;
    }
    const double scale = 1.0 + std::max(inf_norm(m), inf_norm(it->second));
    if ((it->second - m.transpose()).cwiseAbs().maxCoeff() > kTransposeTolerance * scale) {
      throw DomainError("AutocovarianceMap: K(" + std::to_string(neg) + ") != K(" +
                        std::to_string(a) + ")^T");
    }
  }
  lags_.merge(mirrors);
}

AutocovarianceMap AutocovarianceMap::white(Group group, std::size_t modes,
                                           const RealMatrix& at_zero) {
  return AutocovarianceMap(std::move(group), modes, {{0, at_zero}});
}

RealMatrix AutocovarianceMap::at(Lag a) const {
  if (!group_.contains(a)) throw DomainError("AutocovarianceMap::at: lag outside the group");
  auto it = lags_.find(a);
  if (it == lags_.end()) return RealMatrix::Zero(dim(), dim());
  return it->second;
}

std::int64_t AutocovarianceMap::support_radius() const {
  if (group_.is_finite()) return static_cast<std::int64_t>(group_.order()) - 1;
  std::int64_t radius = 0;
  for (const auto& [a, m] : lags_) {
    if (!m.isZero(0.0)) radius = std::max(radius, std::abs(a));
  }
  return radius;
}

ClassicalCovarianceKernel ClassicalCovarianceKernel::zero(Group group, std::size_t modes) {
  return ClassicalCovarianceKernel(AutocovarianceMap(std::move(group), modes, {}));
}

std::vector<Lag> window_range(Lag first, Lag last) {
  if (last < first) throw DomainError("window_range: empty range");
  std::vector<Lag> out;
  out.reserve(static_cast<std::size_t>(last - first + 1));
  for (Lag a = first; a <= last; ++a) out.push_back(a);
  return out;
}

QuantumCovarianceMatrix assemble_block_matrix(const AutocovarianceMap& k,
                                              std::span<const Lag> sites) {
  check_window(k.group(), sites);
  const Eigen::Index d = k.dim();
  const auto n = static_cast<Eigen::Index>(sites.size());
  RealMatrix out(d * n, d * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.block(i * d, j * d, d, d) = k.at(k.group().subtract(sites[j], sites[i]));
    }
  }
  return QuantumCovarianceMatrix(std::move(out), k.modes(), sites.size());
}

ComplexMatrix augmented_kernel_matrix(const AutocovarianceMap& k, std::span<const Lag> sites) {
  return uncertainty_matrix(assemble_block_matrix(k, sites));
}

ValidationReport validate_quantum_kernel(const AutocovarianceMap& k, std::span<const Lag> sites,
                                         double tol) {
  return check_uncertainty(assemble_block_matrix(k, sites), tol);
}

ValidationReport validate_classical_kernel(const ClassicalCovarianceKernel& c,
                                           std::span<const Lag> sites, double tol) {
  const auto block = assemble_block_matrix(c.map(), sites);
  auto report = check_hermitian_psd(block.matrix().cast<Complex>(), inf_norm(block.matrix()), tol);
  report.details.push_back({"classical_psd", report.valid(), report.min_eigenvalue,
                            "[[C(a_j - a_i)]] >= 0 over " + std::to_string(sites.size()) +
                                " site(s)"});
  return report;
}

AutocovarianceMap add_kernels(const AutocovarianceMap& k, const ClassicalCovarianceKernel& c) {
  const auto& cm = c.map();
  if (!(k.group() == cm.group())) throw DomainError("add_kernels: kernels live on different groups");
  if (k.modes() != cm.modes()) throw DomainError("add_kernels: mode counts differ");
  std::map<Lag, RealMatrix> sum = k.table();
  for (const auto& [a, m] : cm.table()) {
    auto [it, inserted] = sum.try_emplace(a, m);
    if (!inserted) it->second += m;
  }
  return AutocovarianceMap(k.group(), k.modes(), std::move(sum));
}

}  // namespace kwm
