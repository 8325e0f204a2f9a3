// core/src/stft.cpp

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

#include "derev/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fft.hpp"

namespace derev {

void StftConfig::validate() const {
  if (frame_len <= 0 || hop <= 0 || dft_len <= 0)
    throw std::invalid_argument("stft: frame_len, hop and dft_len must be positive");
  if (frame_len % hop != 0)
    throw std::invalid_argument("stft: hop must divide frame_len exactly");
  if (dft_len < frame_len)
    throw std::invalid_argument("stft: dft_len must be >= frame_len");
  if (sample_rate <= 0.0)
    throw std::invalid_argument("stft: sample_rate must be > 0");
}

std::vector<double> analysis_window(const StftConfig& cfg) {
  cfg.validate();
  std::vector<double> w(static_cast<std::size_t>(cfg.frame_len));
  // Periodic Hann: satisfies constant overlap-add for any integer overlap
  // factor of the frame length.
  for (int i = 0; i < cfg.frame_len; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg.frame_len);
  return w;
}

namespace {

int frame_count(std::size_t samples, const StftConfig& cfg) {
  const std::size_t usable = samples - static_cast<std::size_t>(cfg.frame_len);
  int n = 1 + static_cast<int>(usable / static_cast<std::size_t>(cfg.hop));
  if (cfg.pad_tail && usable % static_cast<std::size_t>(cfg.hop) != 0) ++n;
  return n;
}

}  // namespace

Spectrogram analyze(const Waveform& wav, const StftConfig& cfg) {
  cfg.validate();
  wav.validate();
  if (wav.num_channels() == 0 || wav.num_samples() == 0)
    throw std::invalid_argument("stft: empty waveform");
  if (wav.num_samples() < static_cast<std::size_t>(cfg.frame_len))
    throw std::invalid_argument("stft: waveform shorter than one frame");
  if (wav.sample_rate != cfg.sample_rate)
    throw std::invalid_argument(
        "stft: waveform sample rate " + std::to_string(wav.sample_rate) +
        " does not match config (" + std::to_string(cfg.sample_rate) +
        "); override the frame geometry to process other rates");

  const int num_frames = frame_count(wav.num_samples(), cfg);
  const int bins = cfg.bins();
  const int chans = wav.num_channels();
  const std::size_t len = wav.num_samples();

  Spectrogram spec(num_frames, bins, chans);
  spec.config = cfg;
  spec.source_samples = len;

  const std::vector<double> window = analysis_window(cfg);
  RealDft dft(cfg.dft_len);
  std::vector<double> frame(static_cast<std::size_t>(cfg.dft_len));
  std::vector<std::complex<double>> out(static_cast<std::size_t>(bins));

  for (int m = 0; m < chans; ++m) {
    const std::vector<double>& x = wav.channels[m];
    for (int n = 0; n < num_frames; ++n) {
      const std::size_t start = static_cast<std::size_t>(n) * cfg.hop;
      std::fill(frame.begin(), frame.end(), 0.0);
      const std::size_t avail =
          std::min<std::size_t>(cfg.frame_len, len - start);
      for (std::size_t i = 0; i < avail; ++i)
        frame[i] = x[start + i] * window[i];
      dft.forward(frame.data(), out.data());
      for (int k = 0; k < bins; ++k) spec.at(n, k, m) = out[k];
    }
  }
  return spec;
}

Waveform synthesize(const Spectrogram& spec, const StftConfig& cfg) {
  cfg.validate();
  if (spec.frames <= 0 || spec.chans <= 0)
    throw std::invalid_argument("stft: empty spectrogram");
  if (spec.bins != cfg.bins())
    throw std::invalid_argument(
        "stft: config dft_len yields " + std::to_string(cfg.bins()) +
        " bins but spectrogram has " + std::to_string(spec.bins));
  if (cfg.frame_len != spec.config.frame_len || cfg.hop != spec.config.hop ||
      cfg.dft_len != spec.config.dft_len)
    throw std::invalid_argument("stft: config mismatch with spectrogram");

  const std::size_t full_len =
      static_cast<std::size_t>(spec.frames - 1) * cfg.hop +
      static_cast<std::size_t>(cfg.frame_len);
  const std::size_t out_len =
      spec.source_samples > 0 ? std::min(spec.source_samples, full_len)
                              : full_len;

  Waveform wav;
  wav.sample_rate = cfg.sample_rate;
  wav.channels.assign(static_cast<std::size_t>(spec.chans), {});

  const std::vector<double> window = analysis_window(cfg);
  RealDft dft(cfg.dft_len);
  std::vector<double> frame(static_cast<std::size_t>(cfg.dft_len));
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(spec.bins));

  // Squared-window overlap accumulation, shared by all channels.
  std::vector<double> norm(full_len, 0.0);
  for (int n = 0; n < spec.frames; ++n) {
    const std::size_t start = static_cast<std::size_t>(n) * cfg.hop;
    for (int i = 0; i < cfg.frame_len; ++i)
      norm[start + i] += window[i] * window[i];
  }

  for (int m = 0; m < spec.chans; ++m) {
    std::vector<double> acc(full_len, 0.0);
    for (int n = 0; n < spec.frames; ++n) {
      for (int k = 0; k < spec.bins; ++k) bins[k] = spec.at(n, k, m);
      dft.inverse(bins.data(), frame.data());
      const std::size_t start = static_cast<std::size_t>(n) * cfg.hop;
      for (int i = 0; i < cfg.frame_len; ++i)
        acc[start + i] += frame[i] * window[i];
    }
    std::vector<double> ch(out_len, 0.0);
    for (std::size_t t = 0; t < out_len; ++t)
      ch[t] = norm[t] > 1e-12 ? acc[t] / norm[t] : 0.0;
    wav.channels[m] = std::move(ch);
  }
  return wav;
}

Spectrogram channel_slice(const Spectrogram& spec, int channel) {
  if (channel < 0 || channel >= spec.chans)
    throw std::invalid_argument("stft: channel index out of range");
  Spectrogram out(spec.frames, spec.bins, 1);
  out.config = spec.config;
  out.source_samples = spec.source_samples;
  for (int n = 0; n < spec.frames; ++n)
    for (int k = 0; k < spec.bins; ++k)
      out.at(n, k, 0) = spec.at(n, k, channel);
  return out;
}

}  // namespace derev
