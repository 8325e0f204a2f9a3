// benchmarks/bench_wpe.cpp

// Copyright 2026  The derev Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "derev/mlp.hpp"
#include "derev/pipeline.hpp"
#include "derev/scene.hpp"
#include "derev/stft.hpp"
#include "derev/wpe.hpp"

namespace {

using namespace derev;

// One shared 2 s, 2-channel noisy reverberant scene at the default STFT
// geometry (800/160/800 at 16 kHz).
const SceneTriple& bench_scene() {
  static const SceneTriple scene = [] {
    SceneSpec spec;
    spec.source = "synth:42:2.0";
    spec.seed = 42;
    spec.rt60_s = 0.5;
    spec.snr_db = 10.0;
    SceneParams params;
    params.channels = 2;
    params.rir_ms = 300.0;
    return realize_scene(spec, params);
  }();
  return scene;
}

const Spectrogram& bench_spectrogram() {
  static const Spectrogram spec = analyze(bench_scene().mixture, StftConfig{});
  return spec;
}

void BM_StftAnalyze(benchmark::State& state) {
  const Waveform& mixture = bench_scene().mixture;
  for (auto _ : state) {
    Spectrogram spec = analyze(mixture, StftConfig{});
    benchmark::DoNotOptimize(spec.data.data());
  }
}
BENCHMARK(BM_StftAnalyze);

void BM_StftSynthesize(benchmark::State& state) {
  const Spectrogram& spec = bench_spectrogram();
  for (auto _ : state) {
    Waveform wav = synthesize(spec);
    benchmark::DoNotOptimize(wav.channels.data());
  }
}
BENCHMARK(BM_StftSynthesize);

// One weighted solve across all bins: the whole cost of the one-shot path.
void BM_WeightSolveOnce(benchmark::State& state) {
  const Spectrogram& spec = bench_spectrogram();
  WpeConfig cfg;
  cfg.order = static_cast<int>(state.range(0));
  const VarianceMap var = update_variance(spec, cfg.variance_floor);
  for (auto _ : state) {
    RegressionWeights w = estimate_weights(spec, var, cfg);
    benchmark::DoNotOptimize(w.g.data());
  }
  state.SetLabel("order " + std::to_string(cfg.order));
}
BENCHMARK(BM_WeightSolveOnce)->Arg(5)->Arg(10)->Arg(15)->Unit(benchmark::kMillisecond);

void BM_OneshotWpe(benchmark::State& state) {
  const Spectrogram& spec = bench_spectrogram();
  WpeConfig cfg;
  const VarianceMap var = update_variance(spec, cfg.variance_floor);
  for (auto _ : state) {
    Spectrogram d = oneshot_wpe(spec, var, cfg);
    benchmark::DoNotOptimize(d.data.data());
  }
}
BENCHMARK(BM_OneshotWpe)->Unit(benchmark::kMillisecond);

void BM_IterativeWpe(benchmark::State& state) {
  const Spectrogram& spec = bench_spectrogram();
  WpeConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) {
    WpeResult r = iterative_wpe(spec, cfg);
    benchmark::DoNotOptimize(r.desired.data.data());
  }
  state.SetLabel(std::to_string(cfg.iterations) + " iterations");
}
BENCHMARK(BM_IterativeWpe)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_MaskInference(benchmark::State& state) {
  static const MlpModel model = make_mlp(401, 2, {64, 64, 64}, 7);
  const Spectrogram& spec = bench_spectrogram();
  for (auto _ : state) {
    MaskPair masks = predict_masks(model, spec);
    benchmark::DoNotOptimize(masks.irm_r.v.data());
  }
}
BENCHMARK(BM_MaskInference)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
