#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "kwm/groups.hpp"
#include "kwm/kernels.hpp"
#include "kwm/linalg.hpp"
#include "kwm/report.hpp"

namespace kwm {

enum class DensityForm {
  /// Z: Hermitian density values F(theta_j) at the G grid points, piecewise constant on cells.
  Grid,
  /// Z: F(theta) = sum_a C_a e^{-i a theta} from a finite coefficient table.
  Fourier,
  /// Finite groups: the mass Phi({m}) of every dual point m.
  Table,
};

const char* to_string(DensityForm form) noexcept;

/// Point mass on the circle (dual of Z).
struct Atom {
  double angle = 0.0;
  ComplexMatrix weight;
};

/// Matrix-valued measure on the dual group: an absolutely continuous density plus
/// a finite list of atoms (Z), or a full table of point masses (finite groups).
///
/// Constructors hermitize every piece and enforce conjugate symmetry
/// Phi(S^{-1}) = conj Phi(S) by averaging conjugate partners; the size of those
/// corrections is kept so validation can report input defects. An atom with no
/// partner at 2pi - theta is kept as is and counted as unpaired.
class SpectralMeasure {
 public:
  static SpectralMeasure grid(Group group, std::size_t dim, std::vector<ComplexMatrix> values,
                              std::vector<Atom> atoms = {});
  static SpectralMeasure fourier(Group group, std::size_t dim,
                                 std::map<Lag, ComplexMatrix> coefficients,
                                 std::vector<Atom> atoms = {});
  static SpectralMeasure table(Group group, std::size_t dim, std::vector<ComplexMatrix> masses);

  const Group& group() const noexcept { return group_; }
  /// Side length of every matrix piece (2k for a k-mode spectrum).
  std::size_t dim() const noexcept { return dim_; }
  std::size_t modes() const noexcept { return dim_ / 2; }
  DensityForm form() const noexcept { return form_; }

  /// Grid values (Grid) or point masses (Table); empty for Fourier.
  const std::vector<ComplexMatrix>& samples() const noexcept { return samples_; }
  const std::map<Lag, ComplexMatrix>& coefficients() const noexcept { return coefficients_; }
  const std::vector<Atom>& atoms() const noexcept { return atoms_; }

  /// Density against Haar measure at dual sample j: the grid value, the Fourier
  /// series evaluated at theta_j, or N * Phi({m}) on a finite dual.
  ComplexMatrix density_at(std::size_t j) const;
  /// The Fourier-form density at an arbitrary angle.
  ComplexMatrix evaluate(double theta) const;

  /// Phi(dual group) = absolutely continuous mass + atomic mass.
  ComplexMatrix total_mass() const;
  ComplexMatrix ac_mass() const;
  ComplexMatrix atomic_mass() const;

  double symmetry_correction() const noexcept { return symmetry_correction_; }
  double hermitian_correction() const noexcept { return hermitian_correction_; }
  std::size_t unpaired_atoms() const noexcept { return unpaired_atoms_; }

 private:
  SpectralMeasure(Group group, std::size_t dim, DensityForm form);
  void check_piece(const ComplexMatrix& m, const char* what) const;
  void symmetrize();

  Group group_;
  std::size_t dim_;
  DensityForm form_;
  std::vector<ComplexMatrix> samples_;
  std::map<Lag, ComplexMatrix> coefficients_;
  std::vector<Atom> atoms_;
  double symmetry_correction_ = 0.0;
  double hermitian_correction_ = 0.0;
  std::size_t unpaired_atoms_ = 0;
};

/// Quantum validity of a KWM spectrum, reported per condition:
///  "uncertainty"         F(theta_j) + (i/2)J >= 0 at every grid point (Z), or
///                        Phi_m + (i/(2N))J >= 0 at every dual point (finite); atom weights >= 0.
///  "conjugate_symmetry"  the input needed no more than threshold correction and every atom is paired.
///  "hermitian_positive"  every piece is Hermitian and PSD.
/// Fourier-form densities are checked on the group's dual grid.
ValidationReport validate_spectrum(const SpectralMeasure& phi, double tol = kDefaultTolerance);

/// Classical validity (no symplectic term): Hermitian PSD pieces and conjugate symmetry.
ValidationReport validate_classical_spectrum(const SpectralMeasure& phi,
                                             double tol = kDefaultTolerance);

/// K(a) = integral of chi(a) over Phi for each requested lag, for any matrix size.
/// Grid densities only resolve |a| <= G/2 - 1 (DomainError beyond). Imaginary
/// parts must vanish to 1e-10 relative, otherwise NumericError.
std::map<Lag, RealMatrix> autocovariance_table(const SpectralMeasure& phi,
                                               std::span<const Lag> lags);

/// autocovariance_table wrapped as a k-mode autocovariance map (dim must be even).
AutocovarianceMap spectrum_to_autocov(const SpectralMeasure& phi, std::span<const Lag> lags);

/// Inverse transform. Finite groups: Phi_m = (1/N) sum_a chi_m(-a) K(a).
/// Z: the purely absolutely continuous Fourier-form density sum_a K(a) e^{-i a theta};
/// atoms cannot be recovered from finitely many lags.
SpectralMeasure autocov_to_spectrum(const AutocovarianceMap& k);

/// Singular part for design_spectrum: atoms on the circle (Z) or point masses
/// added to the table (finite groups; empty means none).
struct SingularPart {
  std::vector<Atom> atoms;
  std::vector<ComplexMatrix> masses;
};

/// Phi(S) = integral over S of M(chi) lambda(dchi) + Psi(S). `field` holds one
/// real 2k x 2k quantum covariance matrix per dual sample (G grid points for Z,
/// N labels for finite groups). Throws DomainError naming every point where
/// M + (i/2)J fails, or when Psi is not conjugate symmetric with PSD pieces.
SpectralMeasure design_spectrum(const Group& group, std::size_t modes,
                                std::span<const RealMatrix> field,
                                const SingularPart& singular = {},
                                double tol = kDefaultTolerance);

/// design_spectrum with the same matrix at every dual point.
SpectralMeasure design_spectrum(const Group& group, const RealMatrix& constant_field,
                                const SingularPart& singular = {},
                                double tol = kDefaultTolerance);

/// c^T Phi c for a real dim x r matrix c; the result has r x r pieces.
SpectralMeasure project(const SpectralMeasure& phi, const RealMatrix& c);

}  // namespace kwm
