#pragma once

#include <cstddef>
#include <vector>

#include "kwm/linalg.hpp"

namespace kwm {

/// Bartlett estimate of a matrix spectral density on the segment grid
/// theta_f = 2 pi f / segment_length.
struct Periodogram {
  std::size_t segments = 0;
  std::size_t segment_length = 0;
  std::vector<double> angles;
  std::vector<ComplexMatrix> values;

  /// Haar average of the estimate (sum over bins * cell / 2pi).
  ComplexMatrix integral() const;
};

/// Splits each row of the k x L `paths` into `segments` blocks, transforms
/// each block, and averages conj(X) X^T / segment_length. A flat density c is
/// estimated without bias. L must be divisible by `segments`, segments >= 4.
Periodogram periodogram(const RealMatrix& paths, std::size_t segments);

}  // namespace kwm
