// tests/test_scene.cpp

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
#include <fstream>
#include <limits>

#include "derev/scene.hpp"
#include "derev/wpe.hpp"
#include "helpers.hpp"

using namespace derev;
using derev::testing::TempDir;
using derev::testing::random_spectrogram;
using derev::testing::tiny_config;

namespace {

// Independent power-ratio oracle over the full signals.
double measured_snr_db(const Waveform& reverberant, const Waveform& mixture) {
  double p_sig = 0.0, p_noise = 0.0;
  for (int m = 0; m < reverberant.num_channels(); ++m)
    for (std::size_t t = 0; t < reverberant.num_samples(); ++t) {
      const double s = reverberant.channels[m][t];
      const double n = mixture.channels[m][t] - s;
      p_sig += s * s;
      p_noise += n * n;
    }
  return 10.0 * std::log10(p_sig / p_noise);
}

RegressionWeights random_weights(std::uint64_t seed, int bins, int chans,
                                 int order, int delay, double scale) {
  Rng rng(seed);
  RegressionWeights w;
  w.chans = chans;
  w.order = order;
  w.delay = delay;
  for (int k = 0; k < bins; ++k) {
    Eigen::VectorXcd g(chans * order);
    for (Eigen::Index i = 0; i < g.size(); ++i)
      g[i] = std::polar(scale * rng.uniform(0.2, 1.0),
                        rng.uniform(0.0, 6.283185307179586));
    w.g.push_back(std::move(g));
  }
  return w;
}

}  // namespace

TEST_CASE("decay envelope reaches -60 dB at rt60") {
  CHECK(rir_decay_envelope(0.5, 0.5) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(rir_decay_envelope(0.3, 0.0) == 1.0);
  // taps actually follow the envelope statistically: check the bound
  const Rir rir = make_rir(0.2, 6400, 1, 5);
  for (int t = 3200; t < 6400; ++t)  // beyond rt60 = 0.2 s = 3200 samples
    CHECK(std::abs(rir.taps[0][static_cast<std::size_t>(t)]) < 1e-3 * 6.0);
}

TEST_CASE("make_rir is deterministic and validates input") {
  const Rir a = make_rir(0.4, 1000, 2, 42);
  const Rir b = make_rir(0.4, 1000, 2, 42);
  REQUIRE(a.num_channels() == 2);
  for (int m = 0; m < 2; ++m)
    for (int t = 0; t < 1000; ++t)
      CHECK(a.taps[m][static_cast<std::size_t>(t)] ==
            b.taps[m][static_cast<std::size_t>(t)]);
  CHECK(a.taps[0][0] == 1.0);
  CHECK(a.taps[1][0] == 1.0);
  // different seed, different tail
  const Rir c = make_rir(0.4, 1000, 2, 43);
  CHECK(a.taps[0][1] != c.taps[0][1]);

  CHECK_THROWS_AS(make_rir(0.0, 100, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(make_rir(0.5, 0, 1, 1), std::invalid_argument);
}

TEST_CASE("length-1 rir is the identity") {
  const Rir rir = make_rir(0.5, 1, 1, 7);
  REQUIRE(rir.length() == 1);
  CHECK(rir.taps[0][0] == 1.0);
  const Waveform src = make_synthetic_speech(3, 0.25);
  const SceneTriple scene =
      render_scene(src, rir, Waveform{}, std::numeric_limits<double>::infinity());
  for (std::size_t t = 0; t < src.num_samples(); ++t) {
    CHECK(scene.reverberant.channels[0][t] == src.channels[0][t]);
    CHECK(scene.clean.channels[0][t] == src.channels[0][t]);
  }
}

TEST_CASE("no-noise mode returns the reverberant signal exactly") {
  const Waveform src = make_synthetic_speech(11, 0.3);
  const Rir rir = make_rir(0.3, 800, 2, 11);
  const SceneTriple scene =
      render_scene(src, rir, Waveform{}, std::numeric_limits<double>::infinity());
  REQUIRE(scene.mixture.num_channels() == 2);
  for (int m = 0; m < 2; ++m)
    for (std::size_t t = 0; t < src.num_samples(); ++t)
      CHECK(scene.mixture.channels[m][t] == scene.reverberant.channels[m][t]);
}

TEST_CASE("snr targets are hit within 0.1 dB") {
  const Waveform src = make_synthetic_speech(13, 0.5);
  const Rir rir = make_rir(0.4, 1600, 2, 13);
  for (double snr : {0.0, 10.0, 25.0}) {
    const Waveform noise = make_white_noise(99, src.num_samples(), 2);
    const SceneTriple scene = render_scene(src, rir, noise, snr);
    CHECK(std::abs(measured_snr_db(scene.reverberant, scene.mixture) - snr) < 0.1);
  }
}

TEST_CASE("scene invariants: equal shapes, exact late-tail split") {
  const Waveform src = make_synthetic_speech(17, 0.4);
  const Rir rir = make_rir(0.5, 2400, 2, 17);
  const Waveform noise = make_white_noise(5, src.num_samples(), 2);
  const SceneTriple scene = render_scene(src, rir, noise, 10.0);

  REQUIRE(scene.clean.num_samples() == src.num_samples());
  REQUIRE(scene.reverberant.num_samples() == src.num_samples());
  REQUIRE(scene.mixture.num_samples() == src.num_samples());

  // reverberant - clean equals the tail-tap convolution
  for (int m = 0; m < 2; ++m) {
    const auto& taps = rir.taps[static_cast<std::size_t>(m)];
    for (std::size_t t = 0; t < src.num_samples(); t += 997) {
      double tail = 0.0;
      for (int l = rir.early_len; l < rir.length(); ++l)
        if (t >= static_cast<std::size_t>(l))
          tail += taps[static_cast<std::size_t>(l)] *
                  src.channels[0][t - static_cast<std::size_t>(l)];
      const double split = scene.reverberant.channels[m][t] -
                           scene.clean.channels[m][t];
      CHECK(std::abs(split - tail) < 1e-12);
    }
  }
}

TEST_CASE("render_scene is linear in the source when noise-free") {
  const Waveform src = make_synthetic_speech(19, 0.25);
  Waveform doubled = src;
  for (double& v : doubled.channels[0]) v *= 2.0;
  const Rir rir = make_rir(0.3, 800, 1, 19);
  const double inf = std::numeric_limits<double>::infinity();
  const SceneTriple a = render_scene(src, rir, Waveform{}, inf);
  const SceneTriple b = render_scene(doubled, rir, Waveform{}, inf);
  for (std::size_t t = 0; t < src.num_samples(); ++t)
    CHECK(b.reverberant.channels[0][t] ==
          doctest::Approx(2.0 * a.reverberant.channels[0][t]).epsilon(1e-12));
}

TEST_CASE("render_scene rejects bad input") {
  const Rir rir = make_rir(0.3, 100, 1, 1);
  CHECK_THROWS_AS(render_scene(Waveform{}, rir, Waveform{}, 10.0),
                  std::invalid_argument);

  const Waveform src = make_synthetic_speech(1, 0.1);
  Waveform stereo = src;
  stereo.channels.push_back(src.channels[0]);
  CHECK_THROWS_AS(render_scene(stereo, rir, Waveform{}, 10.0),
                  std::invalid_argument);

  Waveform silent_noise;
  silent_noise.channels = {std::vector<double>(src.num_samples(), 0.0)};
  CHECK_THROWS_AS(render_scene(src, rir, silent_noise, 10.0),
                  std::invalid_argument);
}

TEST_CASE("mclp scene with zero weights is the desired signal") {
  const StftConfig cfg = tiny_config(16);
  const Spectrogram desired = random_spectrogram(23, 40, cfg.bins(), 1, cfg);
  RegressionWeights w;
  w.chans = 1;
  w.order = 3;
  w.delay = 2;
  w.g.assign(static_cast<std::size_t>(cfg.bins()),
             Eigen::VectorXcd::Zero(3));
  const Spectrogram x = make_mclp_scene(desired, w, 2);
  for (std::size_t i = 0; i < x.data.size(); ++i)
    CHECK(x.data[i] == desired.data[i]);
}

TEST_CASE("mclp scene round-trips through predict_desired") {
  const StftConfig cfg = tiny_config(16);
  const int bins = cfg.bins();

  SUBCASE("single channel") {
    const Spectrogram desired = random_spectrogram(29, 60, bins, 1, cfg);
    const RegressionWeights w = random_weights(31, bins, 1, 4, 3, 0.15);
    const Spectrogram x = make_mclp_scene(desired, w, 3);
    const Spectrogram rec = predict_desired(x, w);
    for (std::size_t i = 0; i < desired.data.size(); ++i)
      CHECK(std::abs(rec.data[i] - desired.data[i]) < 1e-12);
  }

  SUBCASE("two channels via aux") {
    const Spectrogram desired = random_spectrogram(37, 60, bins, 1, cfg);
    const Spectrogram aux = random_spectrogram(41, 60, bins, 1, cfg);
    const RegressionWeights w = random_weights(43, bins, 2, 3, 2, 0.1);
    const Spectrogram x = make_mclp_scene(desired, w, 2, &aux);
    REQUIRE(x.chans == 2);
    const Spectrogram rec = predict_desired(x, w);
    for (int n = 0; n < desired.frames; ++n)
      for (int k = 0; k < bins; ++k)
        CHECK(std::abs(rec.at(n, k, 0) - desired.at(n, k, 0)) < 1e-12);
  }
}

TEST_CASE("mclp scene passes the first delay frames through") {
  const StftConfig cfg = tiny_config(8);
  const Spectrogram desired = random_spectrogram(47, 20, cfg.bins(), 1, cfg);
  const RegressionWeights w = random_weights(53, cfg.bins(), 1, 2, 3, 0.3);
  const Spectrogram x = make_mclp_scene(desired, w, 3);
  for (int n = 0; n < 3; ++n)
    for (int k = 0; k < cfg.bins(); ++k)
      CHECK(x.at(n, k, 0) == desired.at(n, k, 0));
}

TEST_CASE("mclp scene validates arguments") {
  const StftConfig cfg = tiny_config(8);
  const Spectrogram desired = random_spectrogram(59, 10, cfg.bins(), 1, cfg);
  RegressionWeights w = random_weights(61, cfg.bins(), 1, 2, 1, 0.1);
  CHECK_THROWS_AS(make_mclp_scene(desired, w, 0), std::invalid_argument);

  RegressionWeights short_g = w;
  short_g.g[1] = Eigen::VectorXcd::Zero(1);  // wrong per-bin length
  CHECK_THROWS_AS(make_mclp_scene(desired, short_g, 1), std::invalid_argument);

  w.chans = 2;  // claims two channels but no aux given
  CHECK_THROWS_AS(make_mclp_scene(desired, w, 1), std::invalid_argument);
}

TEST_CASE("manifests parse, resolve and realize deterministically") {
  TempDir dir("scene_manifest");
  const auto manifest = dir.path() / "scenes.txt";
  {
    std::ofstream out(manifest);
    out << "# corpus\n";
    out << "synth:100:0.4 7 0.35 10\n";
    out << "\n";
    out << "synth:101 8 0.5 inf\n";
  }
  const auto specs = read_scene_manifest(manifest);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].id == "s0001");
  CHECK(specs[0].seed == 7);
  CHECK(specs[0].rt60_s == 0.35);
  CHECK(specs[0].snr_db == 10.0);
  CHECK(std::isinf(specs[1].snr_db));

  SceneParams params;
  params.channels = 2;
  params.rir_ms = 120.0;
  const SceneTriple a = realize_scene(specs[0], params);
  const SceneTriple b = realize_scene(specs[0], params);
  REQUIRE(a.mixture.num_channels() == 2);
  CHECK(a.mixture.num_samples() == 6400);  // 0.4 s at 16 kHz
  for (std::size_t t = 0; t < a.mixture.num_samples(); ++t)
    CHECK(a.mixture.channels[0][t] == b.mixture.channels[0][t]);

  std::ofstream(dir.path() / "bad.txt") << "synth:1 not-a-number 0.5 10\n";
  CHECK_THROWS_AS(read_scene_manifest(dir.path() / "bad.txt"), std::runtime_error);
}
