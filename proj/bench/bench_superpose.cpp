// Serial vs OpenMP detector superposition on a synthetic many-segment trace.
#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "wavecrest/detector.hpp"

namespace {

std::vector<wavecrest::WaveSegment> make_segments(std::size_t n) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<wavecrest::WaveSegment> segs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& s = segs[i];
    s.id = static_cast<std::int64_t>(i);
    s.wave.k = -0.2 - 2.0 * u(rng);
    s.wave.omega = 0.5 * s.wave.k * s.wave.k;
    s.wave.amplitude = std::polar(0.1, 6.28 * u(rng));
    s.t_in = 100.0 * u(rng);
    s.t_out = s.t_in + 50.0 * u(rng);
  }
  return segs;
}

std::vector<double> make_grid(std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = 150.0 * static_cast<double>(i) / static_cast<double>(n);
  return g;
}

void BM_Serial(benchmark::State& st) {
  const auto segs = make_segments(static_cast<std::size_t>(st.range(0)));
  const auto grid = make_grid(100'000);
  for (auto _ : st) benchmark::DoNotOptimize(wavecrest::superpose_serial(segs, 1.0, grid));
}

void BM_Parallel(benchmark::State& st) {
  const auto segs = make_segments(static_cast<std::size_t>(st.range(0)));
  const auto grid = make_grid(100'000);
  for (auto _ : st) benchmark::DoNotOptimize(wavecrest::superpose(segs, 1.0, grid));
}

}  // namespace

BENCHMARK(BM_Serial)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Parallel)->Arg(16)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
