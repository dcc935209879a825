#include "kwm/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kwm/errors.hpp"

namespace kwm {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::int64_t floor_mod(std::int64_t a, std::int64_t n) {
  const std::int64_t r = a % n;
  return r < 0 ? r + n : r;
}

}  // namespace

Group Group::integers(std::size_t dual_grid_size) {
  if (dual_grid_size < 2 || dual_grid_size % 2 != 0) {
    throw DomainError("Group::integers: dual_grid_size must be even and >= 2, got " +
                      std::to_string(dual_grid_size));
  }
  return Group(GroupKind::Integers, {}, dual_grid_size);
}

Group Group::cyclic_product(std::vector<std::int64_t> moduli) {
  if (moduli.empty()) throw DomainError("Group::cyclic_product: need at least one modulus");
  std::size_t order = 1;
  for (auto n : moduli) {
    if (n < 1) throw DomainError("Group::cyclic_product: moduli must be >= 1");
    order *= static_cast<std::size_t>(n);
  }
  if (order > (std::size_t{1} << 24)) {
    throw UnsupportedError("Group::cyclic_product: group order too large");
  }
  return Group(GroupKind::FiniteCyclicProduct, std::move(moduli), order);
}

std::size_t Group::order() const {
  if (!is_finite()) throw DomainError("Group::order: Z is infinite");
  return dual_grid_size_;
}

std::size_t Group::dual_size() const noexcept { return dual_grid_size_; }

std::int64_t Group::nyquist_lag() const {
  if (is_finite()) throw DomainError("Group::nyquist_lag: only defined for Z");
  return static_cast<std::int64_t>(dual_grid_size_ / 2) - 1;
}

Lag Group::reduce(std::span<const std::int64_t> coords) const {
  if (!is_finite()) {
    if (coords.size() != 1) throw DomainError("Group::reduce: elements of Z have one coordinate");
    return coords[0];
  }
  if (coords.size() != moduli_.size()) {
    throw DomainError("Group::reduce: expected " + std::to_string(moduli_.size()) +
                      " coordinates, got " + std::to_string(coords.size()));
  }
  Lag label = 0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    label = label * moduli_[i] + floor_mod(coords[i], moduli_[i]);
  }
  return label;
}

Lag Group::reduce(std::int64_t a) const {
  if (!is_finite()) return a;
  if (moduli_.size() != 1) {
    throw DomainError("Group::reduce: scalar element given for a product of " +
                      std::to_string(moduli_.size()) + " cyclic groups");
  }
  return floor_mod(a, moduli_[0]);
}

std::vector<std::int64_t> Group::coordinates(Lag a) const {
  if (!contains(a)) throw DomainError("Group::coordinates: element out of range");
  if (!is_finite()) return {a};
  std::vector<std::int64_t> coords(moduli_.size());
  for (std::size_t i = moduli_.size(); i-- > 0;) {
    coords[i] = a % moduli_[i];
    a /= moduli_[i];
  }
  return coords;
}

bool Group::contains(Lag a) const noexcept {
  if (!is_finite()) return true;
  return a >= 0 && static_cast<std::size_t>(a) < dual_grid_size_;
}

Lag Group::add(Lag a, Lag b) const {
  if (!is_finite()) return a + b;
  auto ca = coordinates(a);
  const auto cb = coordinates(b);
  for (std::size_t i = 0; i < ca.size(); ++i) ca[i] += cb[i];
  return reduce(ca);
}

Lag Group::negate(Lag a) const {
  if (!is_finite()) return -a;
  auto ca = coordinates(a);
  for (auto& c : ca) c = -c;
  return reduce(ca);
}

std::vector<Lag> Group::elements() const {
  std::vector<Lag> out(order());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<Lag>(i);
  return out;
}

double Group::grid_angle(std::size_t j) const {
  if (is_finite()) throw DomainError("Group::grid_angle: finite groups have no angle grid");
  if (j >= dual_grid_size_) throw DomainError("Group::grid_angle: grid index out of range");
  return kTwoPi * static_cast<double>(j) / static_cast<double>(dual_grid_size_);
}

std::size_t Group::conjugate_index(std::size_t j) const {
  if (j >= dual_grid_size_) throw DomainError("Group::conjugate_index: index out of range");
  if (!is_finite()) return (dual_grid_size_ - j) % dual_grid_size_;
  return static_cast<std::size_t>(negate(static_cast<Lag>(j)));
}

std::complex<double> Group::character(const DualPoint& chi, Lag a) const {
  if (!contains(a)) throw DomainError("Group::character: element out of range");
  if (!is_finite()) {
    const double* theta = std::get_if<double>(&chi.value);
    if (theta == nullptr) throw DomainError("Group::character: dual of Z is parametrized by an angle");
    if (!(*theta >= 0.0 && *theta < kTwoPi)) {
      throw DomainError("Group::character: angle must lie in [0, 2pi)");
    }
    // Reduce a*theta mod 2pi in long double to keep |chi| = 1 accurate for large lags.
    const long double phase =
        std::fmod(static_cast<long double>(a) * static_cast<long double>(*theta),
                  2.0L * std::numbers::pi_v<long double>);
    return std::polar(1.0, static_cast<double>(phase));
  }
  const std::size_t* m = std::get_if<std::size_t>(&chi.value);
  if (m == nullptr) throw DomainError("Group::character: dual of a finite group is indexed by label");
  return character_at(*m, a);
}

std::complex<double> Group::character_at(std::size_t j, Lag a) const {
  if (j >= dual_grid_size_) throw DomainError("Group::character_at: dual index out of range");
  if (!is_finite()) {
    // exp(2 pi i a j / G) with the exponent reduced exactly in integers.
    const auto g = static_cast<std::int64_t>(dual_grid_size_);
    const std::int64_t r = floor_mod(floor_mod(a, g) * static_cast<std::int64_t>(j), g);
    return std::polar(1.0, kTwoPi * static_cast<double>(r) / static_cast<double>(g));
  }
  if (!contains(a)) throw DomainError("Group::character_at: element out of range");
  const auto cm = coordinates(static_cast<Lag>(j));
  const auto ca = coordinates(a);
  // sum_i m_i a_i / n_i as an exact fraction of the lcm-free product.
  double turns = 0.0;
  for (std::size_t i = 0; i < moduli_.size(); ++i) {
    turns += static_cast<double>(floor_mod(cm[i] * ca[i], moduli_[i])) /
             static_cast<double>(moduli_[i]);
  }
  turns -= std::floor(turns);
  return std::polar(1.0, kTwoPi * turns);
}

double Group::haar_weight(std::span<const Arc> arcs) const {
  if (is_finite()) throw DomainError("Group::haar_weight: arcs only apply to the dual of Z");
  std::vector<Arc> sorted(arcs.begin(), arcs.end());
  for (const auto& arc : sorted) {
    if (!(arc.begin >= 0.0 && arc.begin <= arc.end && arc.end <= kTwoPi)) {
      throw DomainError("Group::haar_weight: arcs must satisfy 0 <= begin <= end <= 2pi");
    }
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const Arc& x, const Arc& y) { return x.begin < y.begin; });
  double total = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i].begin < sorted[i - 1].end) {
      throw DomainError("Group::haar_weight: arcs overlap");
    }
    total += sorted[i].end - sorted[i].begin;
  }
  return total / kTwoPi;
}

double Group::haar_weight(std::span<const std::size_t> dual_points) const {
  if (!is_finite()) throw DomainError("Group::haar_weight: point sets only apply to finite duals");
  std::vector<std::size_t> sorted(dual_points.begin(), dual_points.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("Group::haar_weight: repeated dual point");
  }
  if (!sorted.empty() && sorted.back() >= dual_grid_size_) {
    throw DomainError("Group::haar_weight: dual point out of range");
  }
  return static_cast<double>(sorted.size()) / static_cast<double>(dual_grid_size_);
}

}  // namespace kwm
