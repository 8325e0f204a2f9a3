// derev/scene.hpp

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

#ifndef DEREV_SCENE_HPP_
#define DEREV_SCENE_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "derev/stft.hpp"
#include "derev/waveform.hpp"
#include "derev/wpe.hpp"

namespace derev {

// Ground-truth scene generation: synthetic impulse responses, reverberant
// and noisy mixtures at an exact SNR, and exact regression-model data used
// as a correctness oracle for the dereverberation solver.

// Stochastic room impulse response: white noise under an exponential
// decay envelope, one tap sequence per channel. early_len marks the
// early/late boundary in samples.
struct Rir {
  std::vector<std::vector<double>> taps;
  double sample_rate = 16000.0;
  int early_len = 0;

  int num_channels() const { return static_cast<int>(taps.size()); }
  int length() const { return taps.empty() ? 0 : static_cast<int>(taps.front().size()); }
};

// Amplitude decay factor at time t for a given RT60: reaches 1e-3 (-60 dB
// in energy) at t = rt60.
double rir_decay_envelope(double rt60_s, double t_s);

// Deterministic synthetic RIR. The first tap of every channel is forced
// to 1 (direct path); the rest are unit-variance white noise shaped by
// the RT60 decay envelope. early_len < 0 selects the default 50 ms.
Rir make_rir(double rt60_s, int length, int channels, std::uint64_t seed,
             double sample_rate = 16000.0, int early_len = -1);

// Clean (direct + early reflections), reverberant (full RIR) and mixture
// (reverberant + noise at the target SNR) renderings of one source.
struct SceneTriple {
  Waveform clean;
  Waveform reverberant;
  Waveform mixture;
  double snr_db = 0.0;
  std::uint64_t seed = 0;
};

// Convolves a mono source with the RIR (truncated at early_len for the
// clean rendering) and adds noise scaled so the reverberant-to-noise
// power ratio over the full signals equals snr_db exactly. Pass +inf for
// a noise-free mixture. Mono noise is replicated across channels;
// shorter noise is looped.
SceneTriple render_scene(const Waveform& src, const Rir& rir,
                         const Waveform& noise, double snr_db);

// Builds a spectrogram satisfying the regression model exactly:
//   x1(n,k) = desired(n,k) + g_k^H xbar(n - delay, k)
// frame by frame with zero-padded context, so predict_desired with the
// same weights recovers `desired` to machine precision. `aux` supplies
// channels 2..M when the weights span more than one channel.
Spectrogram make_mclp_scene(const Spectrogram& desired,
                            const RegressionWeights& weights, int delay,
                            const Spectrogram* aux = nullptr);

// Deterministic speech-like test signal: pitched harmonic stack with a
// wandering fundamental, syllabic amplitude gating and unvoiced noise
// bursts. Peak-normalized to 0.5.
Waveform make_synthetic_speech(std::uint64_t seed, double seconds,
                               double sample_rate = 16000.0);

// White Gaussian noise, independent per channel.
Waveform make_white_noise(std::uint64_t seed, std::size_t samples,
                          int channels, double sample_rate = 16000.0);

// One line of a scene manifest: source, seed, RT60 and SNR. The source is
// either a WAV path (resolved relative to the manifest) or a
// `synth:<seed>[:<seconds>]` token for a generated sentence.
struct SceneSpec {
  std::string id;
  std::string source;
  std::uint64_t seed = 0;
  double rt60_s = 0.5;
  double snr_db = 10.0;
};

// Manifest format: one record per line, `source seed rt60_s snr_db`,
// whitespace separated; blank lines and lines starting with '#' are
// ignored. Records are assigned ids s0001, s0002, ... in file order.
std::vector<SceneSpec> read_scene_manifest(const std::filesystem::path& path);

// Shared knobs for realizing manifests into audio.
struct SceneParams {
  int channels = 2;
  double rir_ms = 300.0;
  double early_ms = 50.0;
  double synth_seconds = 2.0;  // default duration of synth: sources
  double sample_rate = 16000.0;
};

// Renders one manifest record deterministically: RIR from the record
// seed, noise from a seed derived from it.
SceneTriple realize_scene(const SceneSpec& spec, const SceneParams& params);

}  // namespace derev

#endif  // DEREV_SCENE_HPP_
