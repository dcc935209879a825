#include <random>

#include <benchmark/benchmark.h>

#include "kwm/diagnostics.hpp"
#include "kwm/kernels.hpp"
#include "kwm/periodogram.hpp"
#include "kwm/simulate.hpp"
#include "kwm/spectra.hpp"
#include "kwm/symplectic.hpp"

namespace {

using namespace kwm;

RealMatrix thermal_like(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = normal(rng);
  return 0.5 * RealMatrix::Identity(n, n) + g * g.transpose() / static_cast<double>(n);
}

void BM_CheckUncertainty(benchmark::State& state) {
  const auto n = state.range(0);
  const QuantumCovarianceMatrix m(thermal_like(n, 1), static_cast<std::size_t>(n / 2));
  for (auto _ : state) benchmark::DoNotOptimize(check_uncertainty(m));
}
BENCHMARK(BM_CheckUncertainty)->RangeMultiplier(2)->Range(8, 128);

void BM_SpectrumToAutocov(benchmark::State& state) {
  const auto grid = static_cast<std::size_t>(state.range(0));
  const auto g = Group::integers(grid);
  const auto phi = design_spectrum(g, 0.5 * RealMatrix::Identity(4, 4));
  const auto lags = window_range(-32, 32);
  for (auto _ : state) benchmark::DoNotOptimize(spectrum_to_autocov(phi, lags));
}
BENCHMARK(BM_SpectrumToAutocov)->RangeMultiplier(4)->Range(256, 16384);

void BM_ValidateKernelWindow(benchmark::State& state) {
  const auto g = Group::integers(256);
  RealMatrix c1(2, 2);
  c1 << 0.1, 0.02, -0.03, 0.05;
  const AutocovarianceMap k(g, 1, {{0, 0.7 * RealMatrix::Identity(2, 2)}, {1, c1}});
  const auto window = window_range(0, state.range(0) - 1);
  for (auto _ : state) benchmark::DoNotOptimize(validate_quantum_kernel(k, window));
}
BENCHMARK(BM_ValidateKernelWindow)->RangeMultiplier(2)->Range(2, 64);

void BM_Periodogram(benchmark::State& state) {
  const auto length = state.range(0);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  RealMatrix paths(2, length);
  for (Eigen::Index i = 0; i < paths.size(); ++i) paths.data()[i] = normal(rng);
  for (auto _ : state) benchmark::DoNotOptimize(periodogram(paths, 16));
}
BENCHMARK(BM_Periodogram)->RangeMultiplier(4)->Range(1024, 65536);

void BM_SampleQuadrature(benchmark::State& state) {
  const auto length = static_cast<std::size_t>(state.range(0));
  const auto g = Group::integers(2 * length);
  const auto q = marginal_spectra(design_spectrum(g, 0.5 * RealMatrix::Identity(2, 2))).first;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_quadrature_process(q, length, seed++));
}
BENCHMARK(BM_SampleQuadrature)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMillisecond);

void BM_MonteCarloDisplacement(benchmark::State& state) {
  const auto g = Group::integers(64);
  const auto k = AutocovarianceMap::white(g, 1, 0.5 * RealMatrix::Identity(2, 2));
  const ClassicalCovarianceKernel c(AutocovarianceMap::white(g, 1, RealMatrix::Identity(2, 2)));
  const auto window = window_range(0, 3);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_displacement(k, c, window, n, 7));
}
BENCHMARK(BM_MonteCarloDisplacement)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
