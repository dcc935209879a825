#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "kwm/linalg.hpp"

namespace kwm {

enum class Verdict { Valid, Invalid };

const char* to_string(Verdict v) noexcept;

/// Outcome of one named condition within a validation.
struct ConditionResult {
  std::string name;
  bool passed = true;
  /// Smallest eigenvalue (or other signed slack) observed for this condition.
  double min_value = 0.0;
  std::string detail;
};

/// A dual point (or window site) where a PSD condition failed.
struct PointViolation {
  std::size_t index = 0;
  /// Angle on the circle for Z duals; NaN otherwise.
  double angle = 0.0;
  double min_eigenvalue = 0.0;
};

struct ValidationReport {
  Verdict verdict = Verdict::Valid;
  double min_eigenvalue = 0.0;
  /// min_eigenvalue + threshold; non-negative iff the PSD part passed.
  double margin = 0.0;
  /// The acceptance threshold tol * (1 + ||M||_inf) actually applied.
  double threshold = 0.0;
  /// Unit vector u with u^H H u < 0; present iff the verdict is Invalid.
  std::optional<ComplexVector> certificate;
  /// Dual point carrying the certificate, for spectral checks.
  std::optional<std::size_t> certificate_point;
  std::vector<ConditionResult> details;
  std::vector<PointViolation> violations;

  bool valid() const noexcept { return verdict == Verdict::Valid; }
};

}  // namespace kwm
