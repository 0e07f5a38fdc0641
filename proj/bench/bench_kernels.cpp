// Serial reference (threads = 1) against the OpenMP kernels. Arg = thread count.
#include <benchmark/benchmark.h>

#include "klab/counting.hpp"
#include "klab/experiment.hpp"
#include "klab/spectrum.hpp"

namespace {

klab::ExperimentConfig bench_config() {
  klab::ExperimentConfig c;
  c.nodes = 128;
  c.t_max = 20.0;
  return c;
}

void BM_LoopTable(benchmark::State& state) {
  const klab::ExperimentConfig c = bench_config();
  const klab::Executor exec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(klab::compute_loop_table(c, exec));
}

void BM_EnumerateSpectrum(benchmark::State& state) {
  const klab::ModelManifold m = klab::make_model({});
  const klab::Submanifold h = klab::make_submanifold(m, bench_config().h);
  const klab::Executor exec(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(klab::enumerate_spectrum(m, h, 400.0, exec));
}

void BM_ConvolveGrid(benchmark::State& state) {
  const klab::ModelManifold m = klab::make_model({});
  const klab::Submanifold h = klab::make_submanifold(m, bench_config().h);
  const klab::CountingFunction n = klab::staircase(klab::enumerate_spectrum(m, h, 150.0));
  const klab::SmoothingKernel k(0.5);
  const std::vector<double> grid = klab::uniform_grid(0.0, 100.0, 0.25);
  const klab::Executor exec(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(klab::convolve_grid(n, k, grid, klab::ConvolutionMode::N, exec));
}

}  // namespace

BENCHMARK(BM_LoopTable)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EnumerateSpectrum)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ConvolveGrid)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
