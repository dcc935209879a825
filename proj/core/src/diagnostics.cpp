#include "kwm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>

#include "kwm/errors.hpp"
#include "kwm/symplectic.hpp"

namespace kwm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool atom_near(const SpectralMeasure& phi, double theta, double cell) {
  for (const auto& atom : phi.atoms()) {
    const double d = std::fabs(atom.angle - theta);
    if (std::min(d, kTwoPi - d) <= cell * (1.0 + 1e-9)) return true;
  }
  return false;
}

}  // namespace

DecompositionReport decompose_and_diagnose(const SpectralMeasure& phi, double tol) {
  if (phi.dim() % 2 != 0) throw DomainError("decompose_and_diagnose: expected 2k x 2k pieces");
  const Group& g = phi.group();
  const std::size_t n = g.dual_size();
  const std::size_t modes = phi.modes();

  DecompositionReport out;
  // Haar measure on a finite dual is counting measure / N, so every piece is
  // absolutely continuous there.
  out.ac_mass = g.is_finite() ? phi.total_mass() : phi.ac_mass();
  out.atomic_mass = g.is_finite() ? ComplexMatrix::Zero(phi.dim(), phi.dim()) : phi.atomic_mass();
  out.purity_bound = std::pow(0.25, static_cast<double>(modes));
  out.min_purity_determinant = std::numeric_limits<double>::infinity();

  const double cell = g.is_finite() ? 0.0 : kTwoPi / static_cast<double>(n);
  double log_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexMatrix f = phi.density_at(j);
    const auto purity = purity_determinant_check(f, modes, tol);
    out.min_purity_determinant = std::min(out.min_purity_determinant, purity.determinant);
    if (!purity.ok) {
      out.purity_ok = false;
      out.purity_failures.push_back(j);
    }
    if (purity.determinant <= kLogDetFloor) {
      out.log_det_finite = false;
    } else {
      log_sum += std::log(purity.determinant);
    }

    const double scale = 1.0 + inf_norm(f);
    if (min_eigenpair(f).value <= tol * scale) ++out.singular_density_points;
    const double trace = f.trace().real();
    if (trace <= tol * scale && (g.is_finite() || !atom_near(phi, g.grid_angle(j), cell))) {
      out.gap_points.push_back(j);
    }
  }
  out.log_det_integral = out.log_det_finite ? log_sum / static_cast<double>(n)
                                            : -std::numeric_limits<double>::infinity();
  return out;
}

PhotonNumberReport photon_numbers(const SpectralMeasure& phi) {
  if (phi.dim() % 2 != 0) throw DomainError("photon_numbers: expected 2k x 2k pieces");
  const RealMatrix k0 = phi.total_mass().real();
  PhotonNumberReport out;
  for (Eigen::Index j = 0; j < k0.rows(); j += 2) {
    const double n = 0.5 * (k0(j, j) + k0(j + 1, j + 1) - 1.0);
    out.per_mode.push_back(n);
    out.total += n;
  }
  return out;
}

std::pair<SpectralMeasure, SpectralMeasure> marginal_spectra(const SpectralMeasure& phi) {
  if (phi.dim() % 2 != 0) throw DomainError("marginal_spectra: expected 2k x 2k pieces");
  const auto k = static_cast<Eigen::Index>(phi.modes());
  RealMatrix select_q = RealMatrix::Zero(2 * k, k);
  RealMatrix select_p = RealMatrix::Zero(2 * k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    select_q(2 * i, i) = 1.0;
    select_p(2 * i + 1, i) = 1.0;
  }
  return {project(phi, select_q), project(phi, select_p)};
}

SpectralMeasure scalar_spectrum(const SpectralMeasure& phi, const RealVector& c) {
  if (c.size() != static_cast<Eigen::Index>(phi.dim())) {
    throw DomainError("scalar_spectrum: coefficient vector has the wrong length");
  }
  if (c.isZero(0.0)) throw DomainError("scalar_spectrum: coefficient vector must be non-zero");
  return project(phi, RealMatrix(c));
}

MixingReport mixing_diagnostics(const SpectralMeasure& phi,
                                const std::optional<AutocovarianceMap>& k) {
  MixingReport out;
  const Group& g = phi.group();
  if (g.is_finite()) {
    out.finite_group = true;
    out.has_atoms = true;
    out.note = "atomic by construction; diagnostics apply to Z only";
    return out;
  }
  out.has_atoms = !phi.atoms().empty();

  std::map<Lag, RealMatrix> table;
  if (k) {
    if (!(k->group() == g)) throw DomainError("mixing_diagnostics: kernel lives on another group");
    table = k->table();
  } else {
    const std::int64_t reach =
        phi.form() == DensityForm::Grid ? std::min<std::int64_t>(g.nyquist_lag(), 256) : 256;
    table = autocovariance_table(phi, window_range(0, reach));
  }

  std::int64_t reach = 0;
  for (const auto& [a, m] : table) reach = std::max(reach, std::abs(a));
  const RealMatrix k0 = table.count(0) ? table.at(0) : RealMatrix::Zero(phi.dim(), phi.dim());
  out.tail_from = reach / 2 + 1;
  out.tail_to = reach;
  for (const auto& [a, m] : table) {
    if (std::abs(a) >= out.tail_from) out.tail_norm = std::max(out.tail_norm, inf_norm(m));
  }
  out.decays = out.tail_norm <= kDecayRatio * inf_norm(k0);
  out.note = out.decays
      ? "autocovariance vanishes on the examined tail; c^T K(a) c -> 0 is sufficient for strong mixing of scalar directions"
      : "autocovariance persists on the examined tail";
  if (out.has_atoms) out.note += "; atoms present, scalar quadrature processes need not be weakly mixing";
  return out;
}

}  // namespace kwm
