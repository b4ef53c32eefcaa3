// Microbenchmarks for the hot paths: detection, channel assembly, quadrature.

#include <benchmark/benchmark.h>

#include "capasim/channel.hpp"
#include "capasim/detector.hpp"
#include "capasim/rng.hpp"
#include "capasim/sim.hpp"
#include "capasim/waveform.hpp"

using namespace capasim;

namespace {

ComplexMatrix random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c) {
  ComplexMatrix m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m(i) = rng.cgaussian();
  return m;
}

void BM_GabpDetect(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(1);
  const ComplexMatrix h = random_matrix(rng, n, n);
  const ComplexVector y = random_matrix(rng, n, 1);
  GaBPConfig cfg;
  cfg.noise_variance = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gabp_detect(y, h, cfg));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_GabpDetect)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNSquared);

void BM_LmmseDetect(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(2);
  const ComplexMatrix h = random_matrix(rng, n, n);
  const ComplexVector y = random_matrix(rng, n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lmmse_detect(y, h, 0.05, 1.0));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LmmseDetect)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNCubed);

void BM_LmmseDetectNaive(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  Rng rng(3);
  const ComplexMatrix h = random_matrix(rng, n, n);
  const ComplexVector y = random_matrix(rng, n, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(lmmse_detect_naive(y, h, 0.05, 1.0));
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_LmmseDetectNaive)->RangeMultiplier(2)->Range(32, 256)->Complexity(benchmark::oNCubed);

void BM_BuildEffectiveChannel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(4);
  std::vector<NormalizedPath> paths(5);
  for (auto& p : paths) {
    p.gain = rng.cgaussian();
    p.delay_taps = static_cast<long>(rng.next_u64() % static_cast<std::uint64_t>(n));
    p.doppler = rng.uniform(-2.0, 2.0);
  }
  const WaveformSpec spec = WaveformSpec::afdm(n, default_afdm_c1(n, 2.0), 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_effective_channel(spec, paths));
  }
}
BENCHMARK(BM_BuildEffectiveChannel)->Arg(64)->Arg(144);

void BM_ApertureCoupling(benchmark::State& state) {
  const int points = static_cast<int>(state.range(0));
  SimConfig table;
  const ScenarioGeometry geo = table.scenario_geometry();
  Rng rng(5);
  const std::vector<Path> paths = sample_paths(geo, rng);
  const CurrentDesign j_tx = matched_current(geo.tx, paths[0], Side::Tx);
  const CurrentDesign j_rx = matched_current(geo.rx, paths[0], Side::Rx);
  QuadratureGrid grid;
  grid.tx_x = grid.tx_z = grid.rx_x = grid.rx_z = points;
  for (auto _ : state) {
    benchmark::DoNotOptimize(effective_path_matrix_capa(j_tx, j_rx, paths[1], grid, geo.tx,
                                                        geo.rx, geo.wavelength()));
  }
}
BENCHMARK(BM_ApertureCoupling)->Arg(10)->Arg(20);

void BM_RunTrial(benchmark::State& state) {
  SimConfig cfg;
  cfg.subcarriers = static_cast<int>(state.range(0));
  std::uint64_t seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_trial(cfg, 15.0, seed++));
  }
}
BENCHMARK(BM_RunTrial)->Arg(64)->Arg(144)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
