// core/src/scene.cpp

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

#include "derev/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "derev/rng.hpp"
#include "derev/wav_io.hpp"

namespace derev {

namespace {

// Truncated convolution: out[t] = sum_l taps[l] * src[t - l], same length
// as the source.
std::vector<double> convolve_trunc(const std::vector<double>& src,
                                   const std::vector<double>& taps,
                                   int tap_count) {
  const std::size_t len = src.size();
  std::vector<double> out(len, 0.0);
  const int count = std::min<int>(tap_count, static_cast<int>(taps.size()));
  for (int l = 0; l < count; ++l) {
    const double h = taps[static_cast<std::size_t>(l)];
    if (h == 0.0) continue;
    for (std::size_t t = static_cast<std::size_t>(l); t < len; ++t)
      out[t] += h * src[t - static_cast<std::size_t>(l)];
  }
  return out;
}

double total_power(const Waveform& wav) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& ch : wav.channels) {
    for (double x : ch) sum += x * x;
    count += ch.size();
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

double rir_decay_envelope(double rt60_s, double t_s) {
  return std::exp(-3.0 * std::numbers::ln10 * t_s / rt60_s);
}

Rir make_rir(double rt60_s, int length, int channels, std::uint64_t seed,
             double sample_rate, int early_len) {
  if (!(rt60_s > 0.0)) throw std::invalid_argument("rir: rt60 must be > 0");
  if (length < 1) throw std::invalid_argument("rir: length must be >= 1");
  if (channels < 1) throw std::invalid_argument("rir: channels must be >= 1");
  if (early_len < 0)
    early_len = static_cast<int>(std::lround(0.050 * sample_rate));
  early_len = std::min(early_len, length);

  Rir rir;
  rir.sample_rate = sample_rate;
  rir.early_len = std::max(early_len, 1);
  rir.taps.assign(static_cast<std::size_t>(channels), {});

  Rng rng(seed);
  for (int m = 0; m < channels; ++m) {
    auto& taps = rir.taps[static_cast<std::size_t>(m)];
    taps.resize(static_cast<std::size_t>(length));
    taps[0] = 1.0;  // direct path
    for (int t = 1; t < length; ++t)
      taps[static_cast<std::size_t>(t)] =
          rng.gaussian() * rir_decay_envelope(rt60_s, t / sample_rate);
  }
  return rir;
}

SceneTriple render_scene(const Waveform& src, const Rir& rir,
                         const Waveform& noise, double snr_db) {
  src.validate();
  if (src.num_channels() != 1)
    throw std::invalid_argument("scene: source must be mono");
  if (src.num_samples() == 0)
    throw std::invalid_argument("scene: empty source");
  if (rir.num_channels() < 1 || rir.length() < 1)
    throw std::invalid_argument("scene: empty rir");

  const std::vector<double>& x = src.channels[0];
  const int chans = rir.num_channels();

  SceneTriple scene;
  scene.snr_db = snr_db;
  scene.clean.sample_rate = src.sample_rate;
  scene.reverberant.sample_rate = src.sample_rate;
  scene.mixture.sample_rate = src.sample_rate;

  for (int m = 0; m < chans; ++m) {
    const auto& taps = rir.taps[static_cast<std::size_t>(m)];
    scene.reverberant.channels.push_back(
        convolve_trunc(x, taps, rir.length()));
    scene.clean.channels.push_back(convolve_trunc(x, taps, rir.early_len));
  }

  if (std::isinf(snr_db) && snr_db > 0.0) {
    scene.mixture = scene.reverberant;
    return scene;
  }

  noise.validate();
  if (noise.num_channels() != 1 && noise.num_channels() != chans)
    throw std::invalid_argument("scene: noise must be mono or match rir channels");
  if (noise.num_samples() == 0)
    throw std::invalid_argument("scene: empty noise");

  // Loop / replicate noise to the rendered geometry.
  const std::size_t len = x.size();
  Waveform shaped;
  shaped.sample_rate = src.sample_rate;
  for (int m = 0; m < chans; ++m) {
    const auto& nch =
        noise.channels[noise.num_channels() == 1 ? 0 : static_cast<std::size_t>(m)];
    std::vector<double> v(len);
    for (std::size_t t = 0; t < len; ++t) v[t] = nch[t % nch.size()];
    shaped.channels.push_back(std::move(v));
  }

  const double p_rev = total_power(scene.reverberant);
  const double p_noise = total_power(shaped);
  if (p_noise <= 0.0)
    throw std::invalid_argument("scene: zero-power noise with finite snr");
  const double gain = std::sqrt(p_rev / (p_noise * std::pow(10.0, snr_db / 10.0)));

  scene.mixture = scene.reverberant;
  for (int m = 0; m < chans; ++m)
    for (std::size_t t = 0; t < len; ++t)
      scene.mixture.channels[static_cast<std::size_t>(m)][t] +=
          gain * shaped.channels[static_cast<std::size_t>(m)][t];
  return scene;
}

Spectrogram make_mclp_scene(const Spectrogram& desired,
                            const RegressionWeights& weights, int delay,
                            const Spectrogram* aux) {
  if (desired.chans != 1)
    throw std::invalid_argument("mclp: desired must be single-channel");
  if (delay < 1) throw std::invalid_argument("mclp: delay must be >= 1");
  const int aux_chans = aux != nullptr ? aux->chans : 0;
  const int chans = 1 + aux_chans;
  if (weights.chans != chans)
    throw std::invalid_argument("mclp: weight channel count mismatch");
  if (weights.bins() != desired.bins)
    throw std::invalid_argument("mclp: weight bin count mismatch");
  if (aux != nullptr && (aux->frames != desired.frames || aux->bins != desired.bins))
    throw std::invalid_argument("mclp: aux shape mismatch");

  const int order = weights.order;
  Spectrogram out(desired.frames, desired.bins, chans);
  out.config = desired.config;
  out.source_samples = desired.source_samples;

  for (int m = 0; m < aux_chans; ++m)
    for (int n = 0; n < desired.frames; ++n)
      for (int k = 0; k < desired.bins; ++k)
        out.at(n, k, 1 + m) = aux->at(n, k, m);

  // Channel 1 is built in ascending frame order; the regression context
  // only reaches frames < n, which are already final.
  for (int k = 0; k < desired.bins; ++k) {
    const Eigen::VectorXcd& g = weights.g[static_cast<std::size_t>(k)];
    if (g.size() != weights.taps())
      throw std::invalid_argument("mclp: weight length mismatch");
    for (int n = 0; n < desired.frames; ++n) {
      std::complex<double> pred(0.0, 0.0);
      for (int m = 0; m < chans; ++m) {
        const int lmax = std::min(order, n - delay + 1);
        for (int l = 0; l < lmax; ++l)
          pred += std::conj(g[m * order + l]) * out.at(n - delay - l, k, m);
      }
      out.at(n, k, 0) = desired.at(n, k, 0) + pred;
    }
  }
  return out;
}

Waveform make_synthetic_speech(std::uint64_t seed, double seconds,
                               double sample_rate) {
  if (!(seconds > 0.0)) throw std::invalid_argument("synth: seconds must be > 0");
  const std::size_t len = static_cast<std::size_t>(seconds * sample_rate);
  if (len == 0) throw std::invalid_argument("synth: zero-length request");

  Rng rng(seed);
  std::vector<double> x(len, 0.0);

  const int harmonics = 12;
  std::vector<double> phase(harmonics);
  std::vector<double> amp(harmonics);
  for (int h = 0; h < harmonics; ++h) {
    phase[h] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    // rough formant shaping: emphasize low harmonics and one mid band
    const double fall = 1.0 / (1.0 + h);
    const double band = std::exp(-0.5 * std::pow((h - 5.0) / 1.5, 2.0));
    amp[h] = fall + 0.7 * band;
  }

  const double f0_base = rng.uniform(100.0, 180.0);
  const double vibrato = rng.uniform(0.3, 0.8);
  const double syllable_hz = rng.uniform(2.5, 4.5);
  const double syllable_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

  double carrier = 0.0;
  double fric = 0.0;
  for (std::size_t t = 0; t < len; ++t) {
    const double ts = static_cast<double>(t) / sample_rate;
    const double f0 = f0_base * (1.0 + 0.06 * std::sin(2.0 * std::numbers::pi * vibrato * ts));
    carrier += 2.0 * std::numbers::pi * f0 / sample_rate;

    double voiced = 0.0;
    for (int h = 0; h < harmonics; ++h)
      voiced += amp[h] * std::sin((h + 1) * carrier + phase[h]);

    // syllabic gate in [0, 1], raised-cosine shaped
    const double gate_raw =
        0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * syllable_hz * ts + syllable_phase);
    const double gate = gate_raw * gate_raw;

    // high-passed noise filling the unvoiced gaps
    const double white = rng.gaussian();
    fric = 0.7 * fric + 0.3 * white;
    const double unvoiced = (white - fric) * (1.0 - gate);

    x[t] = gate * voiced * 0.25 + unvoiced * 0.05;
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : x) v *= 0.5 / peak;
  return make_mono(std::move(x), sample_rate);
}

Waveform make_white_noise(std::uint64_t seed, std::size_t samples,
                          int channels, double sample_rate) {
  if (channels < 1) throw std::invalid_argument("noise: channels must be >= 1");
  Rng rng(seed);
  Waveform wav;
  wav.sample_rate = sample_rate;
  wav.channels.assign(static_cast<std::size_t>(channels),
                      std::vector<double>(samples));
  for (auto& ch : wav.channels)
    for (double& v : ch) v = rng.gaussian() * 0.1;
  return wav;
}

std::vector<SceneSpec> read_scene_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("manifest: cannot open " + path.string());
  std::vector<SceneSpec> specs;
  std::string line;
  while (std::getline(in, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    SceneSpec spec;
    std::string seed_tok, rt60_tok, snr_tok;
    if (!(fields >> spec.source >> seed_tok >> rt60_tok >> snr_tok))
      throw std::runtime_error("manifest: bad record in " + path.string() +
                               ": '" + line + "'");
    try {
      // std::stod accepts "inf" for noise-free scenes; stream extraction
      // of doubles does not
      spec.seed = std::stoull(seed_tok);
      spec.rt60_s = std::stod(rt60_tok);
      spec.snr_db = std::stod(snr_tok);
    } catch (const std::exception&) {
      throw std::runtime_error("manifest: bad record in " + path.string() +
                               ": '" + line + "'");
    }
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "s%04zu", specs.size() + 1);
    spec.id = idbuf;
    // WAV paths are relative to the manifest location
    if (spec.source.rfind("synth:", 0) != 0) {
      const std::filesystem::path p(spec.source);
      if (p.is_relative()) spec.source = (path.parent_path() / p).string();
    }
    specs.push_back(std::move(spec));
  }
  return specs;
}

namespace {

Waveform load_scene_source(const SceneSpec& spec, const SceneParams& params) {
  if (spec.source.rfind("synth:", 0) == 0) {
    std::uint64_t synth_seed = 0;
    double seconds = params.synth_seconds;
    const std::string rest = spec.source.substr(6);
    const auto colon = rest.find(':');
    try {
      synth_seed = std::stoull(rest.substr(0, colon));
      if (colon != std::string::npos) seconds = std::stod(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::runtime_error("scene: bad synth source token '" + spec.source + "'");
    }
    return make_synthetic_speech(synth_seed, seconds, params.sample_rate);
  }
  Waveform wav = read_wav(spec.source);
  if (wav.num_channels() > 1) wav.channels.resize(1);  // take channel 1
  if (wav.sample_rate != params.sample_rate)
    throw std::runtime_error("scene: source " + spec.source +
                             " sample rate does not match scene params");
  return wav;
}

}  // namespace

SceneTriple realize_scene(const SceneSpec& spec, const SceneParams& params) {
  const Waveform src = load_scene_source(spec, params);
  const int rir_len = std::max(
      1, static_cast<int>(std::lround(params.rir_ms * 1e-3 * params.sample_rate)));
  const int early_len = std::max(
      1, static_cast<int>(std::lround(params.early_ms * 1e-3 * params.sample_rate)));
  const Rir rir = make_rir(spec.rt60_s, rir_len, params.channels, spec.seed,
                           params.sample_rate, early_len);
  Waveform noise;
  if (!(std::isinf(spec.snr_db) && spec.snr_db > 0.0))
    noise = make_white_noise(spec.seed ^ 0x9e3779b97f4a7c15ull,
                             src.num_samples(), params.channels,
                             params.sample_rate);
  SceneTriple scene = render_scene(src, rir, noise, spec.snr_db);
  scene.seed = spec.seed;
  return scene;
}

}  // namespace derev
