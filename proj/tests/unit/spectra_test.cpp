#include "kwm/spectra.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kwm/errors.hpp"
#include "oracles.hpp"
#include "random_fixtures.hpp"

using namespace kwm;
using kwm::testing::Rng;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix ceye2(double s) { return s * ComplexMatrix::Identity(2, 2); }

SpectralMeasure flat(const Group& g, double level, std::vector<Atom> atoms = {}) {
  return SpectralMeasure::grid(g, 2, std::vector<ComplexMatrix>(g.dual_grid_size(), ceye2(level)),
                               std::move(atoms));
}

// Zero on [pi/2, pi) and on the mirror (pi, 3pi/2], 1/2 I elsewhere.
SpectralMeasure gapped(const Group& g) {
  std::vector<ComplexMatrix> values(g.dual_grid_size());
  for (std::size_t j = 0; j < values.size(); ++j) {
    const double theta = g.grid_angle(j);
    const bool in_gap = (theta >= kPi / 2 && theta < kPi) || (theta > kPi && theta <= 3 * kPi / 2);
    values[j] = in_gap ? ceye2(0.0) : ceye2(0.5);
  }
  return SpectralMeasure::grid(g, 2, std::move(values));
}

double max_abs(const RealMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(spectra, flat_vacuum_is_valid) {
  const auto r = validate_spectrum(flat(Group::integers(), 0.5));
  EXPECT_TRUE(r.valid());
  EXPECT_NEAR(r.min_eigenvalue, 0.0, 1e-15);
  ASSERT_EQ(r.details.size(), 3u);
  for (const auto& d : r.details) EXPECT_TRUE(d.passed) << d.name;
}

TEST(spectra, gap_of_positive_haar_measure_is_rejected) {
  const auto g = Group::integers(64);
  const auto r = validate_spectrum(gapped(g));
  EXPECT_FALSE(r.valid());
  // Eigenvalues of (i/2)J are +-1/2.
  EXPECT_NEAR(r.min_eigenvalue, -0.5, 1e-12);
  ASSERT_TRUE(r.certificate_point.has_value());
  const double theta = g.grid_angle(*r.certificate_point);
  EXPECT_TRUE((theta >= kPi / 2 && theta < kPi) || (theta > kPi && theta <= 3 * kPi / 2));
  // Every violation lies in the gap: 16 + 16 grid points.
  EXPECT_EQ(r.violations.size(), 32u);
  for (const auto& v : r.violations) {
    EXPECT_TRUE((v.angle >= kPi / 2 && v.angle < kPi) || (v.angle > kPi && v.angle <= 3 * kPi / 2));
  }
  EXPECT_TRUE(r.details[1].passed);
  EXPECT_TRUE(r.details[2].passed);
}

TEST(spectra, under_vacuum_density_fails_everywhere) {
  const auto g = Group::integers(32);
  const auto r = validate_spectrum(flat(g, 0.4));
  EXPECT_FALSE(r.valid());
  EXPECT_NEAR(r.min_eigenvalue, 0.4 - 0.5, 1e-14);
  EXPECT_NEAR(kwm::testing::oracle_uncertainty_min_eig(0.4 * RealMatrix::Identity(2, 2)), -0.1, 1e-14);
  EXPECT_EQ(r.violations.size(), 32u);
}

TEST(spectra, finite_group_check_uses_haar_weight) {
  const auto z2 = Group::cyclic_product({2});
  // Phi_1 = 1/4 I: Phi_1 + (i/4)J has eigenvalues 0 and 1/2.
  const auto phi = SpectralMeasure::table(z2, 2, {ceye2(0.75), ceye2(0.25)});
  const auto r = validate_spectrum(phi);
  EXPECT_TRUE(r.valid());
  EXPECT_NEAR(r.min_eigenvalue, 0.0, 1e-15);
  const auto bad = SpectralMeasure::table(z2, 2, {ceye2(0.75), ceye2(0.2)});
  EXPECT_FALSE(validate_spectrum(bad).valid());
}

TEST(spectra, constructors_report_symmetry_defects) {
  const auto g = Group::integers(8);
  std::vector<ComplexMatrix> values(8, ceye2(0.5));
  values[1] = ceye2(0.7);
  const auto phi = SpectralMeasure::grid(g, 2, values);
  EXPECT_NEAR(phi.symmetry_correction(), 0.1, 1e-15);
  EXPECT_EQ(phi.samples()[1], ceye2(0.6));
  EXPECT_EQ(phi.samples()[7], ceye2(0.6));
  const auto r = validate_spectrum(phi);
  EXPECT_FALSE(r.valid());
  EXPECT_FALSE(r.details[1].passed);
  EXPECT_TRUE(r.details[0].passed);

  const auto lonely = flat(g, 0.5, {{1.0, ceye2(0.1)}});
  EXPECT_EQ(lonely.unpaired_atoms(), 1u);
  EXPECT_FALSE(validate_spectrum(lonely).valid());

  ComplexMatrix complex_at_zero = ceye2(0.1);
  complex_at_zero(0, 1) = Complex(0.0, 0.05);
  complex_at_zero(1, 0) = Complex(0.0, -0.05);
  const auto real_point = flat(g, 0.5, {{0.0, complex_at_zero}});
  EXPECT_EQ(real_point.atoms()[0].weight.imag(), RealMatrix::Zero(2, 2));
  EXPECT_NEAR(real_point.symmetry_correction(), 0.05, 1e-15);
}

TEST(spectra, shape_errors) {
  const auto g = Group::integers(8);
  EXPECT_THROW(SpectralMeasure::grid(g, 2, std::vector<ComplexMatrix>(7, ceye2(0.5))), DomainError);
  EXPECT_THROW(SpectralMeasure::grid(g, 2, std::vector<ComplexMatrix>(8, ComplexMatrix::Identity(3, 3))),
               DomainError);
  EXPECT_THROW(flat(g, 0.5, {{7.0, ceye2(0.1)}}), DomainError);
  EXPECT_THROW(SpectralMeasure::table(g, 2, {}), DomainError);
  EXPECT_THROW(SpectralMeasure::grid(Group::cyclic_product({8}), 2, {}), DomainError);
  const auto odd = SpectralMeasure::grid(g, 3, std::vector<ComplexMatrix>(8, ComplexMatrix::Identity(3, 3)));
  EXPECT_THROW(validate_spectrum(odd), DomainError);
}

TEST(spectra, flat_density_transforms_to_white_kernel) {
  const auto k = spectrum_to_autocov(flat(Group::integers(64), 0.5), window_range(-31, 31));
  EXPECT_LE(max_abs(k.at(0) - 0.5 * RealMatrix::Identity(2, 2)), 1e-15);
  for (Lag a = 1; a <= 31; ++a) EXPECT_LE(max_abs(k.at(a)), 1e-15);
}

TEST(spectra, atom_pair_adds_a_cosine) {
  const auto g = Group::integers(64);
  const auto phi = flat(g, 0.5, {{kPi / 2, ceye2(0.25)}, {3 * kPi / 2, ceye2(0.25)}});
  const auto k = spectrum_to_autocov(phi, window_range(-31, 31));
  for (Lag a = -31; a <= 31; ++a) {
    // Direct two-atom sum: 1/4 (e^{i a pi/2} + e^{i a 3pi/2}) = 1/2 cos(a pi/2).
    const double expected = (a == 0 ? 0.5 : 0.0) + 0.5 * std::cos(static_cast<double>(a) * kPi / 2);
    EXPECT_LE(max_abs(k.at(a) - expected * RealMatrix::Identity(2, 2)), 1e-14) << a;
  }
}

TEST(spectra, cyclic_transform_matches_brute_force_dft) {
  const auto z4 = Group::cyclic_product({4});
  const auto phi = SpectralMeasure::table(z4, 2, std::vector<ComplexMatrix>(4, ceye2(0.25)));
  const auto k = spectrum_to_autocov(phi, z4.elements());
  EXPECT_LE(max_abs(k.at(0) - RealMatrix::Identity(2, 2)), 1e-15);
  for (Lag a = 1; a < 4; ++a) EXPECT_LE(max_abs(k.at(a)), 1e-15);

  Rng rng(31);
  const auto z8 = Group::cyclic_product({8});
  const auto random = kwm::testing::random_valid_table(z8, 1, rng);
  const auto roots = kwm::testing::roots_of_unity(8);
  const auto kr = spectrum_to_autocov(random, z8.elements());
  for (Lag a = 0; a < 8; ++a) {
    ComplexMatrix sum = ComplexMatrix::Zero(2, 2);
    for (std::size_t m = 0; m < 8; ++m) sum += roots[(m * static_cast<std::size_t>(a)) % 8] * random.samples()[m];
    EXPECT_LE((kr.at(a).cast<Complex>() - sum).cwiseAbs().maxCoeff(), 1e-14);
  }
}

TEST(spectra, nyquist_limit) {
  const auto phi = flat(Group::integers(16), 0.5);
  EXPECT_NO_THROW(spectrum_to_autocov(phi, window_range(-7, 7)));
  EXPECT_THROW(spectrum_to_autocov(phi, window_range(0, 8)), DomainError);
  EXPECT_THROW(spectrum_to_autocov(SpectralMeasure::table(Group::cyclic_product({2}), 2, {ceye2(1), ceye2(1)}),
                                   std::vector<Lag>{2}),
               DomainError);
}

TEST(spectra, inverse_transform_on_z2) {
  const auto z2 = Group::cyclic_product({2});
  const AutocovarianceMap k(z2, 1, {{0, RealMatrix::Identity(2, 2)}, {1, 0.5 * RealMatrix::Identity(2, 2)}});
  const auto phi = autocov_to_spectrum(k);
  ASSERT_EQ(phi.form(), DensityForm::Table);
  EXPECT_LE((phi.samples()[0] - ceye2(0.75)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((phi.samples()[1] - ceye2(0.25)).cwiseAbs().maxCoeff(), 1e-15);
  const auto r = validate_spectrum(phi);
  EXPECT_TRUE(r.valid());
  EXPECT_NEAR(r.min_eigenvalue, 0.0, 1e-15);
}

TEST(spectra, inverse_transform_on_integers_is_fourier_form) {
  const auto g = Group::integers(32);
  const auto phi = autocov_to_spectrum(AutocovarianceMap::white(g, 1, 0.5 * RealMatrix::Identity(2, 2)));
  ASSERT_EQ(phi.form(), DensityForm::Fourier);
  EXPECT_TRUE(phi.atoms().empty());
  for (std::size_t j = 0; j < 32; ++j) EXPECT_LE((phi.density_at(j) - ceye2(0.5)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((phi.evaluate(0.123) - ceye2(0.5)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(spectra, roundtrip_on_cyclic_groups) {
  Rng rng(32);
  const auto g = Group::cyclic_product({16});
  for (int t = 0; t < 10; ++t) {
    const auto phi = kwm::testing::random_valid_table(g, 2, rng);
    ASSERT_TRUE(validate_spectrum(phi).valid());
    const auto back = autocov_to_spectrum(spectrum_to_autocov(phi, g.elements()));
    for (std::size_t m = 0; m < 16; ++m) {
      EXPECT_LE((back.samples()[m] - phi.samples()[m]).cwiseAbs().maxCoeff(), 1e-10);
    }
  }
  const auto prod = Group::cyclic_product({2, 3});
  const auto phi = kwm::testing::random_valid_table(prod, 1, rng);
  const auto back = autocov_to_spectrum(spectrum_to_autocov(phi, prod.elements()));
  for (std::size_t m = 0; m < 6; ++m) {
    EXPECT_LE((back.samples()[m] - phi.samples()[m]).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(spectra, roundtrip_on_band_limited_grid) {
  // F(theta) = C0 + C1 e^{-i theta} + C1^T e^{i theta} + C2 e^{-2 i theta} + C2^T e^{2 i theta}.
  const auto g = Group::integers(32);
  RealMatrix c0(2, 2), c1(2, 2), c2(2, 2);
  c0 << 2.0, 0.1, 0.1, 1.5;
  c1 << 0.3, 0.1, -0.05, 0.2;
  c2 << 0.05, 0.0, 0.02, -0.04;
  const auto fourier = SpectralMeasure::fourier(
      g, 2, {{0, c0.cast<Complex>()}, {1, c1.cast<Complex>()}, {2, c2.cast<Complex>()}});
  std::vector<ComplexMatrix> values(32);
  for (std::size_t j = 0; j < 32; ++j) values[j] = fourier.density_at(j);
  const auto grid = SpectralMeasure::grid(g, 2, values);
  EXPECT_LE(grid.symmetry_correction(), 1e-15);

  const auto k = spectrum_to_autocov(grid, window_range(-15, 15));
  EXPECT_LE(max_abs(k.at(1) - c1), 1e-14);
  EXPECT_LE(max_abs(k.at(-2) - c2.transpose()), 1e-14);
  EXPECT_LE(max_abs(k.at(7)), 1e-14);
  const auto back = autocov_to_spectrum(k);
  for (std::size_t j = 0; j < 32; ++j) {
    EXPECT_LE((back.density_at(j) - values[j]).cwiseAbs().maxCoeff(), 1e-10);
  }
  // Fourier form -> kernel -> Fourier form is exact.
  const auto k2 = spectrum_to_autocov(fourier, window_range(-3, 3));
  const auto back2 = autocov_to_spectrum(k2);
  for (const auto& [a, c] : back2.coefficients()) {
    EXPECT_EQ(c, fourier.coefficients().count(a) ? fourier.coefficients().at(a) : ComplexMatrix::Zero(2, 2));
  }
}

TEST(spectra, transform_outputs_satisfy_transpose_symmetry) {
  Rng rng(33);
  const auto g = Group::integers(32);
  for (int t = 0; t < 10; ++t) {
    const auto phi = kwm::testing::random_valid_grid(g, 2, rng);
    const auto table = autocovariance_table(phi, window_range(-15, 15));
    for (Lag a = 1; a <= 15; ++a) EXPECT_LE(max_abs(table.at(-a) - table.at(a).transpose()), 1e-13);
    EXPECT_LE(max_abs(table.at(0) - phi.total_mass().real()), 1e-12);
  }
}

TEST(spectra, valid_spectra_give_valid_kernels) {
  Rng rng(34);
  const auto g = Group::integers(32);
  for (int t = 0; t < 20; ++t) {
    const auto phi = kwm::testing::random_valid_grid(g, 1 + static_cast<std::size_t>(t % 2), rng);
    ASSERT_TRUE(validate_spectrum(phi).valid());
    const auto k = spectrum_to_autocov(phi, window_range(-6, 6));
    for (Lag n = 1; n <= 6; ++n) EXPECT_TRUE(validate_quantum_kernel(k, window_range(0, n - 1)).valid());
    EXPECT_TRUE(validate_quantum_kernel(k, std::vector<Lag>{0, 2, 3, 6}).valid());
  }
}

TEST(spectra, per_point_check_matches_subset_enumeration) {
  Rng rng(35);
  const auto g = Group::cyclic_product({6});
  const RealMatrix j = kwm::testing::explicit_symplectic(1);
  std::normal_distribution<double> normal(0.0, 0.05);
  for (int t = 0; t < 10; ++t) {
    auto valid = kwm::testing::random_valid_table(g, 1, rng);
    std::vector<ComplexMatrix> masses = valid.samples();
    for (auto& m : masses) m += normal(rng) * ComplexMatrix::Identity(2, 2);
    const auto phi = SpectralMeasure::table(g, 2, masses);
    bool all_subsets = true;
    for (unsigned mask = 1; mask < (1u << 6); ++mask) {
      ComplexMatrix h = ComplexMatrix::Zero(2, 2);
      int size = 0;
      for (unsigned m = 0; m < 6; ++m) {
        if (mask & (1u << m)) {
          h += phi.samples()[m];
          ++size;
        }
      }
      h.imag() += 0.5 * (size / 6.0) * j;
      if (kwm::testing::lapack_min_eigenvalue(h) < -1e-9 * (1.0 + inf_norm(h))) all_subsets = false;
    }
    EXPECT_EQ(all_subsets, validate_spectrum(phi).details[0].passed);
  }
}

TEST(spectra, design_recipe) {
  const auto g = Group::integers(64);
  const auto vacuum = design_spectrum(g, 0.5 * RealMatrix::Identity(2, 2));
  EXPECT_EQ(vacuum.samples(), std::vector<ComplexMatrix>(64, ceye2(0.5)));

  SingularPart atoms;
  atoms.atoms = {{kPi / 3, ceye2(0.25)}, {5 * kPi / 3, ceye2(0.25)}};
  const auto thermal = design_spectrum(g, RealMatrix::Identity(2, 2), atoms);
  EXPECT_TRUE(validate_spectrum(thermal).valid());
  const auto k = spectrum_to_autocov(thermal, std::vector<Lag>{0});
  EXPECT_LE(max_abs(k.at(0) - 1.5 * RealMatrix::Identity(2, 2)), 1e-14);

  const auto z8 = Group::cyclic_product({8});
  const auto finite = design_spectrum(z8, 0.125 * 4.0 * RealMatrix::Identity(2, 2));
  EXPECT_TRUE(validate_spectrum(finite).valid());
  EXPECT_LE((finite.samples()[3] - ceye2(0.5 / 8.0)).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(spectra, design_rejects_bad_inputs) {
  const auto g = Group::integers(8);
  std::vector<RealMatrix> field(8, 0.5 * RealMatrix::Identity(2, 2));
  field[2] = 0.3 * RealMatrix::Identity(2, 2);
  field[5] = 0.3 * RealMatrix::Identity(2, 2);
  try {
    design_spectrum(g, 1, field);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find(" 2 5"), std::string::npos) << e.what();
  }
  SingularPart unpaired;
  unpaired.atoms = {{1.0, ceye2(0.1)}};
  EXPECT_THROW(design_spectrum(g, 0.5 * RealMatrix::Identity(2, 2), unpaired), DomainError);
  SingularPart negative;
  negative.atoms = {{0.0, ceye2(-0.1)}};
  EXPECT_THROW(design_spectrum(g, 0.5 * RealMatrix::Identity(2, 2), negative), DomainError);
  EXPECT_THROW(design_spectrum(g, 1, std::vector<RealMatrix>(7, RealMatrix::Identity(2, 2))), DomainError);
}

TEST(spectra, total_mass_equals_lag_zero) {
  Rng rng(36);
  const auto z12 = Group::cyclic_product({12});
  const auto g = Group::integers(32);
  for (int t = 0; t < 10; ++t) {
    const auto a = kwm::testing::random_valid_table(z12, 2, rng);
    const auto b = kwm::testing::random_valid_grid(g, 2, rng);
    EXPECT_LE(max_abs(spectrum_to_autocov(a, std::vector<Lag>{0}).at(0) - a.total_mass().real()), 1e-10);
    EXPECT_LE(max_abs(spectrum_to_autocov(b, std::vector<Lag>{0}).at(0) - b.total_mass().real()), 1e-10);
  }
}
