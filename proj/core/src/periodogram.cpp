#include "kwm/periodogram.hpp"

#include <fftw3.h>

#include <memory>
#include <numbers>
#include <string>

#include "kwm/errors.hpp"

namespace kwm {
namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

ComplexMatrix Periodogram::integral() const {
  if (values.empty()) return {};
  ComplexMatrix sum = ComplexMatrix::Zero(values.front().rows(), values.front().cols());
  for (const auto& v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

Periodogram periodogram(const RealMatrix& paths, std::size_t segments) {
  const auto k = paths.rows();
  const auto length = static_cast<std::size_t>(paths.cols());
  if (k == 0 || length == 0) throw DomainError("periodogram: empty paths");
  if (segments < 4) throw DomainError("periodogram: need at least 4 segments");
  if (length % segments != 0) {
    throw DomainError("periodogram: path length " + std::to_string(length) +
                      " is not divisible by " + std::to_string(segments) + " segments");
  }
  const std::size_t seg_len = length / segments;
  const auto n = static_cast<Eigen::Index>(seg_len);

  // Column-major k x seg_len buffers; each row is one strided transform.
  ComplexMatrix in(k, n);
  ComplexMatrix out(k, n);
  const int len = static_cast<int>(seg_len);
  const int stride = static_cast<int>(k);
  Plan plan(fftw_plan_many_dft(1, &len, stride, reinterpret_cast<fftw_complex*>(in.data()), nullptr,
                               stride, 1, reinterpret_cast<fftw_complex*>(out.data()), nullptr,
                               stride, 1, FFTW_FORWARD, FFTW_ESTIMATE));
  if (!plan) throw NumericError("periodogram: FFTW planning failed");

  Periodogram result;
  result.segments = segments;
  result.segment_length = seg_len;
  result.values.assign(seg_len, ComplexMatrix::Zero(k, k));
  for (std::size_t s = 0; s < segments; ++s) {
    in = paths.middleCols(static_cast<Eigen::Index>(s * seg_len), n).cast<Complex>();
    fftw_execute(plan.get());
    for (Eigen::Index f = 0; f < n; ++f) {
      const ComplexVector x = out.col(f);
      result.values[static_cast<std::size_t>(f)].noalias() += x.conjugate() * x.transpose();
    }
  }
  const double norm = 1.0 / (static_cast<double>(segments) * static_cast<double>(seg_len));
  result.angles.resize(seg_len);
  for (std::size_t f = 0; f < seg_len; ++f) {
    result.values[f] *= norm;
    result.angles[f] = 2.0 * std::numbers::pi * static_cast<double>(f) / static_cast<double>(seg_len);
  }
  return result;
}

}  // namespace kwm
