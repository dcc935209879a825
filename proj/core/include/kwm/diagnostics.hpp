#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kwm/kernels.hpp"
#include "kwm/linalg.hpp"
#include "kwm/spectra.hpp"

namespace kwm {

/// Summary of the Lebesgue split of a spectrum and the density-level bounds.
struct DecompositionReport {
  ComplexMatrix ac_mass;
  ComplexMatrix atomic_mass;

  /// det Re F(chi) >= 4^{-k} at every dual sample.
  bool purity_ok = true;
  double min_purity_determinant = 0.0;
  double purity_bound = 0.0;
  std::vector<std::size_t> purity_failures;

  /// Haar average of log det Re F; -inf when some sample has det <= kLogDetFloor.
  double log_det_integral = 0.0;
  bool log_det_finite = true;

  /// Dual samples where Tr F <= tol with no atom within one grid cell.
  std::vector<std::size_t> gap_points;
  /// Samples where u^T F u > 0 fails for some u, i.e. F is singular (grid level only).
  std::size_t singular_density_points = 0;
};

inline constexpr double kLogDetFloor = 1e-300;

DecompositionReport decompose_and_diagnose(const SpectralMeasure& phi,
                                           double tol = kDefaultTolerance);

struct PhotonNumberReport {
  std::vector<double> per_mode;
  double total = 0.0;
};

/// <N_j> = (phi_{2j-1,2j-1}(D^) + phi_{2j,2j}(D^) - 1) / 2 for a mean-zero Gaussian process.
PhotonNumberReport photon_numbers(const SpectralMeasure& phi);

/// Position and momentum marginals Phi_q = [[phi_{2i-1,2j-1}]], Phi_p = [[phi_{2i,2j}]].
std::pair<SpectralMeasure, SpectralMeasure> marginal_spectra(const SpectralMeasure& phi);

/// Spectrum c^T Phi c of the scalar process Z_a = sum_r c_r X_{a r}; c must be non-zero.
SpectralMeasure scalar_spectrum(const SpectralMeasure& phi, const RealVector& c);

struct MixingReport {
  bool finite_group = false;
  bool has_atoms = false;
  /// max ||K(a)||_inf over the tail half of the examined lags.
  double tail_norm = 0.0;
  std::int64_t tail_from = 0;
  std::int64_t tail_to = 0;
  /// Tail norm <= kDecayRatio * ||K(0)||_inf.
  bool decays = false;
  std::string note;
};

inline constexpr double kDecayRatio = 1e-6;

/// Atom and autocovariance-decay flags. When `k` is absent the autocovariance is
/// computed from `phi` on lags up to min(nyquist, 256).
MixingReport mixing_diagnostics(const SpectralMeasure& phi,
                                const std::optional<AutocovarianceMap>& k = std::nullopt);

}  // namespace kwm
