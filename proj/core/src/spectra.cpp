#include "kwm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "kwm/errors.hpp"
#include "kwm/symplectic.hpp"

namespace kwm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kAnglePairing = 1e-9;
constexpr double kImaginaryResidual = 1e-10;

double max_abs(const ComplexMatrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double circular_distance(double x, double y) {
  const double d = std::fabs(x - y);
  return std::min(d, kTwoPi - d);
}

bool self_conjugate_angle(double theta) {
  return circular_distance(theta, 0.0) <= kAnglePairing ||
         std::fabs(theta - std::numbers::pi) <= kAnglePairing;
}

// Index of an atom sitting at 2pi - atoms[i].angle, other than i itself.
std::optional<std::size_t> find_partner(const std::vector<Atom>& atoms, std::size_t i) {
  const double target = kTwoPi - atoms[i].angle;
  for (std::size_t j = 0; j < atoms.size(); ++j) {
    if (j != i && circular_distance(atoms[j].angle, target) <= kAnglePairing) return j;
  }
  return std::nullopt;
}

}  // namespace

const char* to_string(DensityForm form) noexcept {
  switch (form) {
    case DensityForm::Grid: return "grid";
    case DensityForm::Fourier: return "fourier";
    case DensityForm::Table: return "table";
  }
  return "unknown";
}

SpectralMeasure::SpectralMeasure(Group group, std::size_t dim, DensityForm form)
    : group_(std::move(group)), dim_(dim), form_(form) {
  if (dim_ == 0) throw DomainError("SpectralMeasure: matrix dimension must be positive");
}

void SpectralMeasure::check_piece(const ComplexMatrix& m, const char* what) const {
  const auto d = static_cast<Eigen::Index>(dim_);
  if (m.rows() != d || m.cols() != d) {
    throw DomainError(std::string("SpectralMeasure: ") + what + " has shape " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ", expected " +
                      std::to_string(d) + "x" + std::to_string(d));
  }
  if (!m.allFinite()) throw DomainError(std::string("SpectralMeasure: non-finite ") + what);
}

SpectralMeasure SpectralMeasure::grid(Group group, std::size_t dim,
                                      std::vector<ComplexMatrix> values, std::vector<Atom> atoms) {
  if (group.is_finite()) throw DomainError("SpectralMeasure::grid: grid densities live on the dual of Z");
  SpectralMeasure out(std::move(group), dim, DensityForm::Grid);
  if (values.size() != out.group_.dual_grid_size()) {
    throw DomainError("SpectralMeasure::grid: expected " +
                      std::to_string(out.group_.dual_grid_size()) + " grid values, got " +
                      std::to_string(values.size()));
  }
  for (const auto& v : values) out.check_piece(v, "grid value");
  out.samples_ = std::move(values);
  out.atoms_ = std::move(atoms);
  out.symmetrize();
  return out;
}

SpectralMeasure SpectralMeasure::fourier(Group group, std::size_t dim,
                                         std::map<Lag, ComplexMatrix> coefficients,
                                         std::vector<Atom> atoms) {
  if (group.is_finite()) {
    throw DomainError("SpectralMeasure::fourier: Fourier-form densities live on the dual of Z");
  }
  SpectralMeasure out(std::move(group), dim, DensityForm::Fourier);
  for (const auto& [a, c] : coefficients) out.check_piece(c, "Fourier coefficient");
  out.coefficients_ = std::move(coefficients);
  out.atoms_ = std::move(atoms);
  out.symmetrize();
  return out;
}

SpectralMeasure SpectralMeasure::table(Group group, std::size_t dim,
                                       std::vector<ComplexMatrix> masses) {
  if (!group.is_finite()) throw DomainError("SpectralMeasure::table: tables need a finite group");
  SpectralMeasure out(std::move(group), dim, DensityForm::Table);
  if (masses.size() != out.group_.order()) {
    throw DomainError("SpectralMeasure::table: expected " + std::to_string(out.group_.order()) +
                      " dual masses, got " + std::to_string(masses.size()));
  }
  for (const auto& m : masses) out.check_piece(m, "dual mass");
  out.samples_ = std::move(masses);
  out.symmetrize();
  return out;
}

void SpectralMeasure::symmetrize() {
  for (const auto& atom : atoms_) {
    check_piece(atom.weight, "atom weight");
    if (!(atom.angle >= 0.0 && atom.angle < kTwoPi)) {
      throw DomainError("SpectralMeasure: atom angle must lie in [0, 2pi)");
    }
  }

  auto hermitize = [this](ComplexMatrix& m) {
    const ComplexMatrix h = 0.5 * (m + m.adjoint());
    hermitian_correction_ = std::max(hermitian_correction_, max_abs(h - m));
    m = h;
  };

  if (form_ == DensityForm::Fourier) {
    // Hermitian F needs C_{-a} = C_a^H; conjugate symmetry needs real C_a.
    // Unlisted mirrors are filled with the adjoint.
    std::map<Lag, ComplexMatrix> full = coefficients_;
    for (const auto& [a, c] : coefficients_) full.try_emplace(-a, c.adjoint());
    std::map<Lag, ComplexMatrix> fixed;
    for (const auto& [a, c] : full) {
      const ComplexMatrix& mirror = full.at(-a);
      hermitian_correction_ = std::max(hermitian_correction_, 0.5 * max_abs(mirror - c.adjoint()));
      symmetry_correction_ = std::max(symmetry_correction_, max_abs(c.imag().cast<Complex>()));
      const RealMatrix avg = 0.5 * (c.real() + mirror.real().transpose());
      fixed.emplace(a, avg.cast<Complex>());
    }
    coefficients_ = std::move(fixed);
  } else {
    for (auto& s : samples_) hermitize(s);
    const std::vector<ComplexMatrix> original = samples_;
    for (std::size_t j = 0; j < samples_.size(); ++j) {
      const std::size_t partner = group_.conjugate_index(j);
      samples_[j] = 0.5 * (original[j] + original[partner].conjugate());
      symmetry_correction_ = std::max(symmetry_correction_, max_abs(samples_[j] - original[j]));
    }
  }

  for (auto& atom : atoms_) hermitize(atom.weight);
  const std::vector<Atom> original = atoms_;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    if (self_conjugate_angle(original[i].angle)) {
      atoms_[i].weight = original[i].weight.real().cast<Complex>();
    } else if (auto partner = find_partner(original, i)) {
      atoms_[i].weight = 0.5 * (original[i].weight + original[*partner].weight.conjugate());
    } else {
      ++unpaired_atoms_;
      symmetry_correction_ = std::max(symmetry_correction_, max_abs(original[i].weight));
      continue;
    }
    symmetry_correction_ =
        std::max(symmetry_correction_, max_abs(atoms_[i].weight - original[i].weight));
  }
}

ComplexMatrix SpectralMeasure::evaluate(double theta) const {
  if (form_ != DensityForm::Fourier) {
    throw DomainError("SpectralMeasure::evaluate: only Fourier-form densities are continuous");
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& [a, c] : coefficients_) {
    out += std::polar(1.0, -static_cast<double>(a) * theta) * c;
  }
  return out;
}

ComplexMatrix SpectralMeasure::density_at(std::size_t j) const {
  if (j >= group_.dual_size()) throw DomainError("SpectralMeasure::density_at: index out of range");
  switch (form_) {
    case DensityForm::Grid: return samples_[j];
    case DensityForm::Table: return static_cast<double>(group_.order()) * samples_[j];
    case DensityForm::Fourier: break;
  }
  const auto d = static_cast<Eigen::Index>(dim_);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  // chi_j(-a) = e^{-i a theta_j}, reduced exactly on the grid.
  for (const auto& [a, c] : coefficients_) out += group_.character_at(j, -a) * c;
  return out;
}

ComplexMatrix SpectralMeasure::ac_mass() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  switch (form_) {
    case DensityForm::Grid:
      for (const auto& s : samples_) out += s;
      return out / static_cast<double>(samples_.size());
    case DensityForm::Table:
      for (const auto& s : samples_) out += s;
      return out;
    case DensityForm::Fourier:
      if (auto it = coefficients_.find(0); it != coefficients_.end()) out = it->second;
      return out;
  }
  return out;
}

ComplexMatrix SpectralMeasure::atomic_mass() const {
  const auto d = static_cast<Eigen::Index>(dim_);
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (const auto& atom : atoms_) out += atom.weight;
  return out;
}

ComplexMatrix SpectralMeasure::total_mass() const { return ac_mass() + atomic_mass(); }

namespace {

struct PieceScan {
  double min_eig = std::numeric_limits<double>::infinity();
  std::optional<std::size_t> worst;
  ComplexVector worst_vector;
  std::vector<PointViolation> violations;
  bool passed = true;

  void visit(std::size_t index, double angle, const ComplexMatrix& h, double scale, double tol) {
    const auto eig = min_eigenpair(h);
    if (eig.value < min_eig) {
      min_eig = eig.value;
      worst = index;
      worst_vector = eig.vector;
    }
    if (eig.value + tol * (1.0 + scale) < 0.0) {
      passed = false;
      violations.push_back({index, angle, eig.value});
    }
  }
};

double sample_angle(const Group& g, std::size_t j) {
  return g.is_finite() ? std::numeric_limits<double>::quiet_NaN() : g.grid_angle(j);
}

ValidationReport validate_impl(const SpectralMeasure& phi, double tol, bool quantum) {
  if (!(tol > 0.0)) throw DomainError("validate_spectrum: tolerance must be positive");
  const Group& g = phi.group();
  const std::size_t n = g.dual_size();

  RealMatrix j_term;
  if (quantum) {
    if (phi.dim() % 2 != 0) throw DomainError("validate_spectrum: quantum spectra need 2k x 2k pieces");
    const double haar = g.is_finite() ? 1.0 / static_cast<double>(g.order()) : 1.0;
    // Table pieces are masses, so the symplectic term carries the Haar weight 1/N.
    const double weight = phi.form() == DensityForm::Table ? haar : 1.0;
    j_term = 0.5 * weight * symplectic_form(phi.modes()).matrix;
  }

  PieceScan uncertainty;
  PieceScan positivity;
  double scale = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const ComplexMatrix piece =
        phi.form() == DensityForm::Table ? phi.samples()[j] : phi.density_at(j);
    const double s = inf_norm(piece);
    scale = std::max(scale, s);
    positivity.visit(j, sample_angle(g, j), piece, s, tol);
    if (quantum) {
      ComplexMatrix h = piece;
      h.imag() += j_term;
      uncertainty.visit(j, sample_angle(g, j), h, s, tol);
    }
  }
  // Atoms carry no Haar mass: only plain positivity binds.
  PieceScan atoms;
  for (std::size_t i = 0; i < phi.atoms().size(); ++i) {
    const auto& atom = phi.atoms()[i];
    const double s = inf_norm(atom.weight);
    scale = std::max(scale, s);
    atoms.visit(i, atom.angle, atom.weight, s, tol);
  }

  ValidationReport report;
  report.threshold = tol * (1.0 + scale);
  const PieceScan& primary = quantum ? uncertainty : positivity;
  const double atom_min = phi.atoms().empty() ? std::numeric_limits<double>::infinity() : atoms.min_eig;

  ConditionResult cond_unc;
  cond_unc.name = quantum ? "uncertainty" : "positivity";
  cond_unc.passed = primary.passed && atoms.passed;
  cond_unc.min_value = std::min(primary.min_eig, atom_min);
  cond_unc.detail = quantum ? (phi.form() == DensityForm::Table ? "Phi_m + (i/(2N))J >= 0 at every dual point"
                                                                : "F(theta_j) + (i/2)J >= 0 at every grid point")
                            : "every density sample >= 0";
  cond_unc.detail += "; atom weights >= 0";
  if (!primary.violations.empty()) {
    cond_unc.detail += "; " + std::to_string(primary.violations.size()) + " violating point(s)";
  }
  if (!atoms.violations.empty()) {
    cond_unc.detail += "; " + std::to_string(atoms.violations.size()) + " non-PSD atom(s)";
  }

  ConditionResult cond_sym;
  cond_sym.name = "conjugate_symmetry";
  cond_sym.min_value = -phi.symmetry_correction();
  cond_sym.passed = phi.symmetry_correction() <= report.threshold && phi.unpaired_atoms() == 0;
  cond_sym.detail = "input correction " + std::to_string(phi.symmetry_correction()) + ", " +
                    std::to_string(phi.unpaired_atoms()) + " unpaired atom(s)";

  ConditionResult cond_pos;
  cond_pos.name = "hermitian_positive";
  cond_pos.min_value = std::min(positivity.min_eig, atom_min);
  cond_pos.passed = positivity.passed && atoms.passed &&
                    phi.hermitian_correction() <= report.threshold;
  cond_pos.detail = "Hermitian correction " + std::to_string(phi.hermitian_correction()) +
                    "; pieces PSD";

  report.min_eigenvalue = cond_unc.min_value;
  report.margin = report.min_eigenvalue + report.threshold;
  report.violations = primary.violations;
  report.violations.insert(report.violations.end(), atoms.violations.begin(), atoms.violations.end());

  const bool ok = cond_unc.passed && cond_sym.passed && cond_pos.passed;
  report.verdict = ok ? Verdict::Valid : Verdict::Invalid;
  if (!ok) {
    if (!primary.passed && (atoms.passed || primary.min_eig <= atoms.min_eig)) {
      report.certificate = primary.worst_vector;
      report.certificate_point = primary.worst;
    } else if (!atoms.passed) {
      report.certificate = atoms.worst_vector;
    } else if (!positivity.passed) {
      report.certificate = positivity.worst_vector;
      report.certificate_point = positivity.worst;
    }
  }
  if (quantum) {
    report.details = {cond_unc, cond_sym, cond_pos};
  } else {
    report.details = {cond_unc, cond_sym};
    report.details.back().passed = cond_sym.passed;
    report.details.push_back({"hermitian", phi.hermitian_correction() <= report.threshold,
                              -phi.hermitian_correction(), "Hermitian correction"});
  }
  return report;
}

}  // namespace

ValidationReport validate_spectrum(const SpectralMeasure& phi, double tol) {
  return validate_impl(phi, tol, true);
}

ValidationReport validate_classical_spectrum(const SpectralMeasure& phi, double tol) {
  return validate_impl(phi, tol, false);
}

std::map<Lag, RealMatrix> autocovariance_table(const SpectralMeasure& phi,
                                               std::span<const Lag> lags) {
  const Group& g = phi.group();
  const auto d = static_cast<Eigen::Index>(phi.dim());
  const double scale = 1.0 + inf_norm(phi.total_mass());
  std::map<Lag, RealMatrix> out;
  for (Lag a : lags) {
    if (!g.contains(a)) {
      throw DomainError("autocovariance_table: lag " + std::to_string(a) + " outside the group");
    }
    ComplexMatrix k = ComplexMatrix::Zero(d, d);
    switch (phi.form()) {
      case DensityForm::Grid: {
        if (std::abs(a) > g.nyquist_lag()) {
          throw DomainError("autocovariance_table: lag " + std::to_string(a) +
                            " beyond the grid's Nyquist lag " + std::to_string(g.nyquist_lag()));
        }
        for (std::size_t j = 0; j < phi.samples().size(); ++j) {
          k += g.character_at(j, a) * phi.samples()[j];
        }
        k /= static_cast<double>(phi.samples().size());
        break;
      }
      case DensityForm::Table:
        for (std::size_t m = 0; m < phi.samples().size(); ++m) {
          k += g.character_at(m, a) * phi.samples()[m];
        }
        break;
      case DensityForm::Fourier:
        if (auto it = phi.coefficients().find(a); it != phi.coefficients().end()) k = it->second;
        break;
    }
    for (const auto& atom : phi.atoms()) k += g.character(DualPoint::angle(atom.angle), a) * atom.weight;
    if (k.imag().cwiseAbs().maxCoeff() > kImaginaryResidual * scale) {
      throw NumericError("autocovariance_table: K(" + std::to_string(a) +
                         ") has an imaginary part; the measure is not conjugate symmetric");
    }
    out.insert_or_assign(a, k.real());
  }
  return out;
}

AutocovarianceMap spectrum_to_autocov(const SpectralMeasure& phi, std::span<const Lag> lags) {
  if (phi.dim() % 2 != 0) throw DomainError("spectrum_to_autocov: expected 2k x 2k pieces");
  return AutocovarianceMap(phi.group(), phi.modes(), autocovariance_table(phi, lags));
}

SpectralMeasure autocov_to_spectrum(const AutocovarianceMap& k) {
  const Group& g = k.group();
  const auto dim = static_cast<std::size_t>(k.dim());
  if (!g.is_finite()) {
    std::map<Lag, ComplexMatrix> coefficients;
    for (const auto& [a, m] : k.table()) coefficients.emplace(a, m.cast<Complex>());
    return SpectralMeasure::fourier(g, dim, std::move(coefficients));
  }
  const std::size_t n = g.order();
  std::vector<ComplexMatrix> masses(n, ComplexMatrix::Zero(k.dim(), k.dim()));
  for (std::size_t m = 0; m < n; ++m) {
    for (const auto& [a, km] : k.table()) masses[m] += std::conj(g.character_at(m, a)) * km;
    masses[m] /= static_cast<double>(n);
  }
  return SpectralMeasure::table(g, dim, std::move(masses));
}

SpectralMeasure design_spectrum(const Group& group, std::size_t modes,
                                std::span<const RealMatrix> field, const SingularPart& singular,
                                double tol) {
  if (field.size() != group.dual_size()) {
    throw DomainError("design_spectrum: expected " + std::to_string(group.dual_size()) +
                      " field matrices, got " + std::to_string(field.size()));
  }
  std::vector<std::size_t> offending;
  for (std::size_t j = 0; j < field.size(); ++j) {
    if (!check_uncertainty(QuantumCovarianceMatrix(field[j], modes, 1), tol).valid()) {
      offending.push_back(j);
    }
  }
  if (!offending.empty()) {
    std::string msg = "design_spectrum: M + (i/2)J fails at dual point(s)";
    for (std::size_t i = 0; i < offending.size() && i < 16; ++i) msg += " " + std::to_string(offending[i]);
    if (offending.size() > 16) msg += " ...";
    throw DomainError(msg);
  }

  // Psi must already be a conjugate-symmetric positive measure.
  const auto dim = static_cast<Eigen::Index>(2 * modes);
  SpectralMeasure psi = group.is_finite()
      ? SpectralMeasure::table(group, 2 * modes,
                               singular.masses.empty()
                                   ? std::vector<ComplexMatrix>(group.order(), ComplexMatrix::Zero(dim, dim))
                                   : singular.masses)
      : SpectralMeasure::fourier(group, 2 * modes, {}, singular.atoms);
  const auto psi_report = validate_classical_spectrum(psi, tol);
  if (!psi_report.valid()) {
    throw DomainError("design_spectrum: singular part is not a conjugate-symmetric positive measure");
  }

  SpectralMeasure phi = [&] {
    if (group.is_finite()) {
      const double haar = 1.0 / static_cast<double>(group.order());
      std::vector<ComplexMatrix> masses(field.size());
      for (std::size_t m = 0; m < field.size(); ++m) {
        masses[m] = haar * field[m].cast<Complex>() + psi.samples()[m];
      }
      return SpectralMeasure::table(group, 2 * modes, std::move(masses));
    }
    std::vector<ComplexMatrix> values(field.size());
    for (std::size_t j = 0; j < field.size(); ++j) values[j] = field[j].cast<Complex>();
    return SpectralMeasure::grid(group, 2 * modes, std::move(values), psi.atoms());
  }();

  // Averaging conjugate partners of valid real fields stays valid, so this cannot
  // fail for well-formed input.
  const auto check = validate_spectrum(phi, tol);
  if (!check.details.front().passed || !check.details.back().passed) {
    throw NumericError("design_spectrum: assembled spectrum failed validation (min eigenvalue " +
                       std::to_string(check.min_eigenvalue) + ")");
  }
  return phi;
}

SpectralMeasure design_spectrum(const Group& group, const RealMatrix& constant_field,
                                const SingularPart& singular, double tol) {
  if (constant_field.rows() % 2 != 0 || constant_field.rows() == 0) {
    throw DomainError("design_spectrum: field matrices must be 2k x 2k");
  }
  const std::vector<RealMatrix> field(group.dual_size(), constant_field);
  return design_spectrum(group, static_cast<std::size_t>(constant_field.rows() / 2), field,
                         singular, tol);
}

SpectralMeasure project(const SpectralMeasure& phi, const RealMatrix& c) {
  if (c.rows() != static_cast<Eigen::Index>(phi.dim()) || c.cols() == 0) {
    throw DomainError("project: expected a dim x r matrix");
  }
  const ComplexMatrix cc = c.cast<Complex>();
  auto apply = [&cc](const ComplexMatrix& m) -> ComplexMatrix { return cc.transpose() * m * cc; };
  const auto r = static_cast<std::size_t>(c.cols());

  std::vector<Atom> atoms;
  atoms.reserve(phi.atoms().size());
  for (const auto& atom : phi.atoms()) atoms.push_back({atom.angle, apply(atom.weight)});

  switch (phi.form()) {
    case DensityForm::Grid:
    case DensityForm::Table: {
      std::vector<ComplexMatrix> pieces;
      pieces.reserve(phi.samples().size());
      for (const auto& s : phi.samples()) pieces.push_back(apply(s));
      return phi.form() == DensityForm::Grid
                 ? SpectralMeasure::grid(phi.group(), r, std::move(pieces), std::move(atoms))
                 : SpectralMeasure::table(phi.group(), r, std::move(pieces));
    }
    case DensityForm::Fourier: {
      std::map<Lag, ComplexMatrix> coefficients;
      for (const auto& [a, m] : phi.coefficients()) coefficients.emplace(a, apply(m));
      return SpectralMeasure::fourier(phi.group(), r, std::move(coefficients), std::move(atoms));
    }
  }
  throw DomainError("project: unknown density form");
}

}  // namespace kwm
