// Serial reference vs OpenMP execution of the parallel kernels.
//
//   deepesn_bench --benchmark_filter=Grid

#include <benchmark/benchmark.h>

#include "deepesn/deepesn.hpp"

using namespace deepesn;

namespace {

RunOptions options_for(const benchmark::State& state) {
  return state.range(0) == 0 ? RunOptions{Execution::serial, 1} : RunOptions{Execution::parallel, 0};
}

void label(benchmark::State& state) { state.SetLabel(state.range(0) == 0 ? "serial" : "parallel"); }

HyperParams params(int layers, int units) {
  HyperParams p;
  p.num_layers = layers;
  p.units_per_layer = units;
  p.input_scale = 1.0;
  p.leak_rate = 0.9;
  p.spectral_radius = 0.7;
  return p;
}

void BM_EvaluateConfig(benchmark::State& state) {
  const auto task = MsoTask::canonical(5);
  const auto lambdas = GridSpec::table1().lambdas;
  std::vector<RawWeights> raw;
  for (std::uint64_t g = 0; g < 8; ++g) raw.push_back(draw_raw_weights(10, 50, 1, g));
  const auto opts = options_for(state);
  for (auto _ : state) {
    benchmark::DoNotOptimize(evaluate_config(task, params(10, 50), lambdas, raw, opts));
  }
  label(state);
}
BENCHMARK(BM_EvaluateConfig)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_GridSearch(benchmark::State& state) {
  const auto task = MsoTask::canonical(5);
  GridSpec grid;
  grid.input_scales = {0.1, 1.0};
  grid.leak_rates = {0.5, 0.9};
  grid.spectral_radii = {0.7, 0.9};
  grid.lambdas = GridSpec::table1().lambdas;
  grid.num_layers = 5;
  grid.units_per_layer = 20;
  grid.guesses = 4;
  const auto opts = options_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(task, grid, opts));
  label(state);
}
BENCHMARK(BM_GridSearch)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LayerSpectra(benchmark::State& state) {
  const auto u = generate_mso(MsoTask::canonical(12));
  std::vector<StateTrajectory> trajs;
  for (std::uint64_t g = 0; g < 4; ++g) {
    auto p = params(10, 100);
    p.seed = g;
    trajs.push_back(run(init_reservoir(p), u));
  }
  const auto opts = options_for(state);
  for (auto _ : state) benchmark::DoNotOptimize(layer_spectra(trajs, 100, opts));
  label(state);
}
BENCHMARK(BM_LayerSpectra)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
