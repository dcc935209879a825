#pragma once

// Random generators for property tests. Valid spectra are assembled from the
// sufficient recipe  real quantum covariance + conjugate-symmetric PSD noise.

#include <unsupported/Eigen/MatrixFunctions>

#include <cstddef>
#include <random>
#include <vector>

#include "kwm/groups.hpp"
#include "kwm/linalg.hpp"
#include "kwm/spectra.hpp"
#include "oracles.hpp"

namespace kwm::testing {

using Rng = std::mt19937_64;

inline RealMatrix random_gaussian(Eigen::Index rows, Eigen::Index cols, Rng& rng, double sd = 1.0) {
  std::normal_distribution<double> normal(0.0, sd);
  RealMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng);
  return m;
}

inline RealMatrix random_symmetric(Eigen::Index n, Rng& rng, double sd = 1.0) {
  const RealMatrix g = random_gaussian(n, n, rng, sd);
  return 0.5 * (g + g.transpose());
}

inline RealMatrix random_psd(Eigen::Index n, Rng& rng, double sd = 1.0) {
  const RealMatrix g = random_gaussian(n, n, rng, sd);
  return g * g.transpose();
}

inline ComplexMatrix random_complex_psd(Eigen::Index n, Rng& rng, double sd = 1.0) {
  ComplexMatrix g(n, n);
  g.real() = random_gaussian(n, n, rng, sd);
  g.imag() = random_gaussian(n, n, rng, sd);
  return g * g.adjoint();
}

/// exp(J H) for random symmetric H is symplectic: S J S^T = J.
inline RealMatrix random_symplectic(std::size_t k, Rng& rng, double strength = 0.5) {
  const auto d = static_cast<Eigen::Index>(2 * k);
  const RealMatrix h = random_symmetric(d, rng, strength);
  const RealMatrix generator = explicit_symplectic(k) * h;
  return generator.exp();
}

/// 1/2 S S^T (pure Gaussian, on the boundary) plus optional classical noise.
inline RealMatrix random_quantum_covariance(std::size_t k, Rng& rng, double noise = 0.3) {
  const RealMatrix s = random_symplectic(k, rng);
  RealMatrix m = 0.5 * s * s.transpose();
  if (noise > 0.0) m += random_psd(static_cast<Eigen::Index>(2 * k), rng, noise);
  return 0.5 * (m + m.transpose());
}

/// Valid KWM spectrum on Z_N (possibly a product via `moduli`).
inline SpectralMeasure random_valid_table(const Group& g, std::size_t k, Rng& rng) {
  const std::size_t n = g.order();
  const auto d = static_cast<Eigen::Index>(2 * k);
  std::vector<ComplexMatrix> masses(n);
  std::vector<bool> done(n, false);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t m = 0; m < n; ++m) {
    if (done[m]) continue;
    const std::size_t partner = g.conjugate_index(m);
    const RealMatrix quantum = random_quantum_covariance(k, rng, coin(rng) ? 0.2 : 0.0);
    ComplexMatrix extra = coin(rng) ? random_complex_psd(d, rng, 0.2) : ComplexMatrix::Zero(d, d);
    if (partner == m) extra = extra.real().cast<Complex>();
    masses[m] = quantum.cast<Complex>() / static_cast<double>(n) + extra;
    masses[partner] = masses[m].conjugate();
    done[m] = done[partner] = true;
  }
  return SpectralMeasure::table(g, 2 * k, std::move(masses));
}

/// Valid KWM spectrum on Z with a grid density and, with probability 1/2, one
/// conjugate pair of atoms.
inline SpectralMeasure random_valid_grid(const Group& g, std::size_t k, Rng& rng) {
  const std::size_t n = g.dual_grid_size();
  const auto d = static_cast<Eigen::Index>(2 * k);
  std::vector<ComplexMatrix> values(n);
  std::bernoulli_distribution coin(0.5);
  for (std::size_t j = 0; j <= n / 2; ++j) {
    const std::size_t partner = g.conjugate_index(j);
    ComplexMatrix f = random_quantum_covariance(k, rng, coin(rng) ? 0.2 : 0.0).cast<Complex>();
    if (coin(rng)) f += random_complex_psd(d, rng, 0.2);
    if (partner == j) f = f.real().cast<Complex>();
    values[j] = f;
    values[partner] = f.conjugate();
  }
  std::vector<Atom> atoms;
  if (coin(rng)) {
    std::uniform_real_distribution<double> angle(0.1, 3.0);
    const double theta = angle(rng);
    const ComplexMatrix w = random_complex_psd(d, rng, 0.3);
    atoms.push_back({theta, w});
    atoms.push_back({2.0 * std::numbers::pi - theta, w.conjugate()});
  }
  return SpectralMeasure::grid(g, 2 * k, std::move(values), std::move(atoms));
}

}  // namespace kwm::testing
