// derev/stft.hpp

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

#ifndef DEREV_STFT_HPP_
#define DEREV_STFT_HPP_

#include <complex>
#include <cstddef>
#include <vector>

#include "derev/waveform.hpp"

namespace derev {

enum class Window { kHann };

// Analysis/synthesis parameters. Defaults are a 50 ms frame with 80%
// overlap at 16 kHz and an 800-point DFT (401 one-sided bins).
//
// The hop must divide the frame length (integer overlap factor) and the
// DFT length must be at least the frame length. Waveforms whose sample
// rate differs from `sample_rate` are rejected; to process other rates,
// override the frame geometry explicitly.
struct StftConfig {
  int frame_len = 800;
  int hop = 160;
  int dft_len = 800;
  Window window = Window::kHann;
  double sample_rate = 16000.0;
  bool pad_tail = true;  // zero-pad a final partial frame

  int bins() const { return dft_len / 2 + 1; }
  void validate() const;

  bool operator==(const StftConfig&) const = default;
};

// Complex STFT tensor indexed (frame, bin, channel), channel fastest.
// One-sided spectrum: bins = dft_len/2 + 1. `source_samples` records the
// analyzed waveform length so synthesis can truncate the padded tail.
struct Spectrogram {
  int frames = 0;
  int bins = 0;
  int chans = 0;
  std::vector<std::complex<double>> data;
  StftConfig config;
  std::size_t source_samples = 0;

  Spectrogram() = default;
  Spectrogram(int n, int k, int m)
      : frames(n), bins(k), chans(m),
        data(static_cast<std::size_t>(n) * k * m) {}

  std::size_t index(int n, int k, int m) const {
    return (static_cast<std::size_t>(n) * bins + k) * chans + m;
  }
  std::complex<double>& at(int n, int k, int m) { return data[index(n, k, m)]; }
  const std::complex<double>& at(int n, int k, int m) const {
    return data[index(n, k, m)];
  }

  bool same_shape(const Spectrogram& o) const {
    return frames == o.frames && bins == o.bins && chans == o.chans;
  }
};

// Periodic analysis window of length cfg.frame_len.
std::vector<double> analysis_window(const StftConfig& cfg);

// Windowed one-sided STFT of every channel. Frames start at multiples of
// the hop; the tail is zero-padded when cfg.pad_tail is set so every input
// sample is covered. Throws on an empty waveform, on input shorter than
// one frame, and on invalid configs.
Spectrogram analyze(const Waveform& wav, const StftConfig& cfg);

// Weighted overlap-add inverse. Applies the analysis window again on
// synthesis and normalizes by the accumulated squared window, so the
// analyze -> synthesize round trip reconstructs interior samples to
// machine precision for any integer overlap factor. Output is truncated
// to the recorded source length. Throws when cfg disagrees with the
// spectrogram's geometry.
Waveform synthesize(const Spectrogram& spec, const StftConfig& cfg);

inline Waveform synthesize(const Spectrogram& spec) {
  return synthesize(spec, spec.config);
}

// Copies one channel into a fresh single-channel spectrogram.
Spectrogram channel_slice(const Spectrogram& spec, int channel);

}  // namespace derev

#endif  // DEREV_STFT_HPP_
