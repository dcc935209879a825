#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace kwm {

/// Canonical label of a group element. For Z it is the integer itself; for
/// Z_{n1} x ... x Z_{nd} it is the mixed-radix index sum_i a_i * (n_{i+1}...n_d)
/// with every coordinate reduced into [0, n_i).
using Lag = std::int64_t;

enum class GroupKind { Integers, FiniteCyclicProduct };

/// A point of the dual group. On the circle (dual of Z) it is an angle in
/// [0, 2pi); on a finite product it is the mixed-radix label of the character.
struct DualPoint {
  std::variant<double, std::size_t> value;

  static DualPoint angle(double theta) { return DualPoint{theta}; }
  static DualPoint index(std::size_t m) { return DualPoint{m}; }
};

/// Half-open arc [begin, end) of the circle, 0 <= begin <= end <= 2pi.
struct Arc {
  double begin = 0.0;
  double end = 0.0;
};

/// The discrete index group D together with its compact dual and the normalized
/// Haar measure on the dual. Immutable after construction.
class Group {
 public:
  /// D = Z. The dual circle is sampled on `dual_grid_size` equispaced points
  /// theta_j = 2 pi j / G; G must be even and >= 2.
  static Group integers(std::size_t dual_grid_size = 256);

  /// D = Z_{n1} x ... x Z_{nd}; every modulus >= 1, at least one factor.
  static Group cyclic_product(std::vector<std::int64_t> moduli);

  GroupKind kind() const noexcept { return kind_; }
  bool is_finite() const noexcept { return kind_ == GroupKind::FiniteCyclicProduct; }
  const std::vector<std::int64_t>& moduli() const noexcept { return moduli_; }
  std::size_t dual_grid_size() const noexcept { return dual_grid_size_; }

  /// |D| for finite groups; throws DomainError for Z.
  std::size_t order() const;

  /// Number of sample points on the dual: G for Z, |D| for finite groups.
  std::size_t dual_size() const noexcept;

  /// Largest |a| whose character sum is resolved by the dual grid (G/2 - 1).
  std::int64_t nyquist_lag() const;

  /// Canonical label from arbitrary integer coordinates (reduced modulo n_i).
  Lag reduce(std::span<const std::int64_t> coords) const;
  Lag reduce(std::int64_t a) const;
  std::vector<std::int64_t> coordinates(Lag a) const;

  bool contains(Lag a) const noexcept;
  Lag add(Lag a, Lag b) const;
  Lag negate(Lag a) const;
  Lag subtract(Lag a, Lag b) const { return add(a, negate(b)); }

  /// Every element of a finite group in label order; throws for Z.
  std::vector<Lag> elements() const;

  /// Angle of dual grid point j (Z only).
  double grid_angle(std::size_t j) const;
  /// Index of the conjugate dual point chi^{-1}: G - j mod G on the grid, -m on finite duals.
  std::size_t conjugate_index(std::size_t j) const;

  /// chi(a). Throws DomainError for an element or dual point outside the group.
  std::complex<double> character(const DualPoint& chi, Lag a) const;
  /// Character at dual sample j (grid point for Z, label for finite groups).
  std::complex<double> character_at(std::size_t j, Lag a) const;

  /// Normalized Haar measure of a finite union of disjoint arcs (Z only).
  double haar_weight(std::span<const Arc> arcs) const;
  /// Normalized Haar measure of a set of distinct dual labels (finite only).
  double haar_weight(std::span<const std::size_t> dual_points) const;

  bool operator==(const Group&) const = default;

 private:
  Group(GroupKind kind, std::vector<std::int64_t> moduli, std::size_t grid)
      : kind_(kind), moduli_(std::move(moduli)), dual_grid_size_(grid) {}

  GroupKind kind_;
  std::vector<std::int64_t> moduli_;
  std::size_t dual_grid_size_;
};

}  // namespace kwm
