// SPDX-License-Identifier: Apache-2.0
//
// Copyright 2026 The angspoof Authors

#include "angspoof/bs_estimator.hpp"
#include "angspoof/channel_model.hpp"
#include "angspoof/experiment_harness.hpp"
#include "angspoof/spoof_optimizer.hpp"

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

namespace {

using namespace angspoof;

// Precoder block with S = M = N_t = n; the update is O(S M N_t).
void BM_UpdatePrecoders(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const SoundingCodebook cb = default_codebook(n, n, n, n);
  const SpoofProblem p(cb, AngleVector({0.3, -0.7}, {-0.4, 0.5}), AngleVector({0.6, -0.2}, {0.1, 1.1}),
                       2.0);
  const arma::cx_vec d(2, arma::fill::ones);
  const arma::cx_vec lambda(2, arma::fill::ones);
  for (auto _ : state) {
    benchmark::DoNotOptimize(update_precoders(p, d, lambda));
  }
  state.SetComplexityN(static_cast<std::int64_t>(n * n * n));
}
BENCHMARK(BM_UpdatePrecoders)->RangeMultiplier(2)->Range(4, 64)->Complexity(benchmark::oN);

void BM_SpoofDesignReference(benchmark::State& state) {
  const SpoofProblem p(default_codebook(15, 5, 15, 15), scene_to_angles(reference_scene()),
                       scene_to_angles(reference_spoof_scene()), 2.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_spoof_design(p));
  }
}
BENCHMARK(BM_SpoofDesignReference)->Unit(benchmark::kMillisecond);

void BM_GridMlEstimate(benchmark::State& state) {
  const SoundingCodebook cb = default_codebook(15, 5, 15, 15);
  const SceneGeometry scene = reference_scene();
  const ChannelParams ch(scene_to_angles(scene), gains_from_scene(scene, 27.8e9, 1));
  const ReceivedSignal y = synthesize_received(ch, cb, 1.0, 0.0, 0);
  const AngleGrid grid = AngleGrid::uniform(static_cast<double>(state.range(0)) / 10.0 * std::numbers::pi / 180);
  EstimatorOptions opts;
  opts.paths = 2;
  opts.keep_surface = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_ml_estimate(y, cb, grid, opts));
  }
}
BENCHMARK(BM_GridMlEstimate)->Arg(20)->Arg(10)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
