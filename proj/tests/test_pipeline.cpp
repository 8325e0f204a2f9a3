// tests/test_pipeline.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "derev/metrics.hpp"
#include "derev/pipeline.hpp"
#include "helpers.hpp"

using namespace derev;

namespace {

StftConfig pipeline_config() {
  StftConfig cfg;
  cfg.frame_len = 256;
  cfg.hop = 64;
  cfg.dft_len = 256;
  return cfg;
}

WpeConfig small_wpe() {
  WpeConfig cfg;
  cfg.order = 6;
  cfg.delay = 2;
  cfg.iterations = 3;
  return cfg;
}

SceneTriple demo_scene(std::uint64_t seed, int channels, double seconds) {
  SceneSpec spec;
  spec.source = "synth:" + std::to_string(seed);
  spec.seed = seed;
  spec.rt60_s = 0.5;
  spec.snr_db = 10.0;
  SceneParams params;
  params.channels = channels;
  params.rir_ms = 150.0;
  params.synth_seconds = seconds;
  return realize_scene(spec, params);
}

const MlpModel& demo_model() {
  static const MlpModel model = [] {
    std::vector<SceneTriple> scenes;
    for (std::uint64_t s = 900; s < 903; ++s) scenes.push_back(demo_scene(s, 1, 0.6));
    TrainConfig cfg;
    cfg.epochs = 3;
    cfg.seed = 1;
    return train_mlp(scenes, pipeline_config(), cfg, {16}, 2, nullptr);
  }();
  return model;
}

Mask ones_mask(int n, int k, int m) { return Mask(n, k, m, 1.0); }

}  // namespace

TEST_CASE("all-ones masks reduce the proposed path to a plain one-shot solve") {
  const SceneTriple scene = demo_scene(2, 2, 0.8);
  EnhanceOptions opts;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();

  const Spectrogram mix = analyze(scene.mixture, opts.stft);
  const MaskPair ones{ones_mask(mix.frames, mix.bins, mix.chans),
                      ones_mask(mix.frames, mix.bins, mix.chans)};
  const Waveform via_masks = enhance_with_masks(mix, ones, opts);

  const VarianceMap var = update_variance(mix, opts.wpe.variance_floor);
  const Waveform direct = synthesize(oneshot_wpe(mix, var, opts.wpe));

  REQUIRE(via_masks.num_samples() == direct.num_samples());
  for (std::size_t t = 0; t < direct.num_samples(); ++t)
    CHECK(via_masks.channels[0][t] == direct.channels[0][t]);

  // and one iteration of the alternating loop is the same solve
  WpeConfig one_iter = opts.wpe;
  one_iter.iterations = 1;
  const Waveform it = synthesize(iterative_wpe(mix, one_iter).desired);
  for (std::size_t t = 0; t < direct.num_samples(); ++t)
    CHECK(it.channels[0][t] == direct.channels[0][t]);
}

TEST_CASE("oracle mode is the masked path with oracle provenance, bit for bit") {
  const SceneTriple scene = demo_scene(3, 2, 0.8);
  EnhanceOptions opts;
  opts.mode = EnhanceMode::kOneshotOracle;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();
  opts.oracle = &scene;

  const Waveform via_mode = enhance(scene.mixture, opts);

  const Spectrogram mix = analyze(scene.mixture, opts.stft);
  const MaskPair masks = oracle_masks(scene, mix, opts.mask_eps);
  const Waveform via_masks = enhance_with_masks(mix, masks, opts);

  REQUIRE(via_mode.num_samples() == via_masks.num_samples());
  for (std::size_t t = 0; t < via_mode.num_samples(); ++t)
    CHECK(via_mode.channels[0][t] == via_masks.channels[0][t]);
}

TEST_CASE("wpe-mask is the masked composition of the wpe mode") {
  const SceneTriple scene = demo_scene(4, 1, 0.8);
  EnhanceOptions opts;
  opts.mode = EnhanceMode::kWpeMask;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();
  opts.model = &demo_model();

  const Waveform out = enhance(scene.mixture, opts);

  const Spectrogram mix = analyze(scene.mixture, opts.stft);
  const WpeResult wpe = iterative_wpe(mix, opts.wpe);
  const MaskPair masks = predict_masks(*opts.model, mix);
  const Waveform expect =
      synthesize(apply_mask(wpe.desired, mask_channel(masks.irm_r, 0)));

  REQUIRE(out.num_samples() == expect.num_samples());
  for (std::size_t t = 0; t < out.num_samples(); ++t)
    CHECK(out.channels[0][t] == expect.channels[0][t]);
}

TEST_CASE("every mode preserves length and runs single-channel") {
  const SceneTriple scene = demo_scene(5, 1, 0.73);  // odd length, padded tail
  EnhanceOptions opts;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();
  opts.model = &demo_model();
  opts.oracle = &scene;

  for (EnhanceMode mode :
       {EnhanceMode::kProposed, EnhanceMode::kWpe, EnhanceMode::kWpeMask,
        EnhanceMode::kOneshotOracle}) {
    opts.mode = mode;
    const Waveform out = enhance(scene.mixture, opts);
    CHECK(out.num_channels() == 1);
    CHECK(out.num_samples() == scene.mixture.num_samples());
    CHECK(out.sample_rate == scene.mixture.sample_rate);
  }
}

TEST_CASE("missing model or oracle is a hard error") {
  const SceneTriple scene = demo_scene(6, 1, 0.5);
  EnhanceOptions opts;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();

  opts.mode = EnhanceMode::kProposed;
  CHECK_THROWS_AS(enhance(scene.mixture, opts), std::invalid_argument);
  opts.mode = EnhanceMode::kWpeMask;
  CHECK_THROWS_AS(enhance(scene.mixture, opts), std::invalid_argument);
  opts.mode = EnhanceMode::kOneshotOracle;
  CHECK_THROWS_AS(enhance(scene.mixture, opts), std::invalid_argument);

  opts.mode = EnhanceMode::kProposed;
  opts.model = &demo_model();
  Waveform empty;
  CHECK_THROWS_AS(enhance(empty, opts), std::invalid_argument);

  // model trained for a different bin count
  StftConfig other = opts.stft;
  other.frame_len = 128;
  other.hop = 32;
  other.dft_len = 128;
  opts.stft = other;
  CHECK_THROWS_AS(enhance(scene.mixture, opts), std::invalid_argument);
}

TEST_CASE("oracle enhancement beats the unprocessed mixture on a small corpus") {
  EnhanceOptions opts;
  opts.mode = EnhanceMode::kOneshotOracle;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();

  StftConfig metric_cfg;
  metric_cfg.frame_len = 128;
  metric_cfg.hop = 32;
  metric_cfg.dft_len = 128;

  int wins = 0;
  const int scenes = 4;
  for (int i = 0; i < scenes; ++i) {
    const SceneTriple scene = demo_scene(50 + static_cast<std::uint64_t>(i), 2, 1.0);
    opts.oracle = &scene;
    const Waveform out = enhance(scene.mixture, opts);

    Waveform clean_ch1 = make_mono(scene.clean.channels[0]);
    Waveform mix_ch1 = make_mono(scene.mixture.channels[0]);
    const double cd_out = cepstral_distance(clean_ch1, out, metric_cfg);
    const double cd_mix = cepstral_distance(clean_ch1, mix_ch1, metric_cfg);
    if (cd_out < cd_mix) ++wins;
  }
  CHECK(wins >= 3);
}

TEST_CASE("stage timings account for the work and count solves") {
  const SceneTriple scene = demo_scene(8, 2, 1.5);
  const int bins = pipeline_config().bins();

  EnhanceOptions opts;
  opts.stft = pipeline_config();
  opts.wpe = small_wpe();
  opts.oracle = &scene;

  SUBCASE("oneshot path solves once per bin") {
    opts.mode = EnhanceMode::kOneshotOracle;
    StageTimings t;
    time_enhance(scene.mixture, opts, &t);
    CHECK(t.weight_solves == bins);
    CHECK(t.weight_solve_s > 0.0);
    const double sum =
        t.analyze_s + t.mask_inference_s + t.weight_solve_s + t.predict_s + t.istft_s;
    CHECK(std::abs(sum - t.total_s) <= 0.05 * t.total_s + 0.002);

    const std::string kv = t.to_kv_text();
    CHECK(kv.find("weight_solve_s=") != std::string::npos);
    CHECK(kv.find("total_s=") != std::string::npos);
  }

  SUBCASE("iterative path solves once per bin per iteration") {
    opts.mode = EnhanceMode::kWpe;
    opts.wpe.iterations = 5;
    StageTimings t;
    time_enhance(scene.mixture, opts, &t);
    CHECK(t.weight_solves == 5LL * bins);
    const double sum =
        t.analyze_s + t.mask_inference_s + t.weight_solve_s + t.predict_s + t.istft_s;
    CHECK(std::abs(sum - t.total_s) <= 0.05 * t.total_s + 0.002);
  }
}
