// core/src/metrics.cpp

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

#include "derev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fft.hpp"

namespace derev {

namespace {

constexpr double kCepstralLogFloor = 1e-10;
constexpr double kSilenceRelDb = -60.0;

Waveform trim_mono(const Waveform& wav, std::size_t len) {
  if (wav.num_channels() != 1)
    throw std::invalid_argument("metrics: waveform must be mono");
  Waveform out;
  out.sample_rate = wav.sample_rate;
  out.channels.push_back({wav.channels[0].begin(),
                          wav.channels[0].begin() + static_cast<long>(len)});
  return out;
}

}  // namespace

std::vector<CepstralFrame> cepstral_frames(const Waveform& wav,
                                           const StftConfig& cfg) {
  if (wav.num_channels() != 1)
    throw std::invalid_argument("metrics: cepstral_frames wants mono input");
  if (wav.num_samples() == 0)
    throw std::invalid_argument("metrics: empty input");

  const Spectrogram spec = analyze(wav, cfg);
  RealDft dft(cfg.dft_len);

  std::vector<CepstralFrame> frames(static_cast<std::size_t>(spec.frames));
  std::vector<std::complex<double>> log_spec(static_cast<std::size_t>(spec.bins));
  std::vector<double> cepstrum(static_cast<std::size_t>(cfg.dft_len));
  for (int n = 0; n < spec.frames; ++n) {
    // Real, even log spectrum given one-sided; its inverse transform is
    // the real cepstrum.
    for (int k = 0; k < spec.bins; ++k)
      log_spec[k] = {std::log(std::abs(spec.at(n, k, 0)) + kCepstralLogFloor), 0.0};
    dft.inverse(log_spec.data(), cepstrum.data());
    for (int q = 0; q < kCepstralCoeffs; ++q)
      frames[static_cast<std::size_t>(n)][static_cast<std::size_t>(q)] = cepstrum[q];
  }
  return frames;
}

double cepstral_distance(const Waveform& reference, const Waveform& estimate,
                         const StftConfig& cfg) {
  if (reference.num_channels() != 1 || estimate.num_channels() != 1)
    throw std::invalid_argument("metrics: cepstral_distance wants mono input");
  const std::size_t len =
      std::min(reference.num_samples(), estimate.num_samples());
  if (len < static_cast<std::size_t>(cfg.frame_len))
    throw std::invalid_argument("metrics: overlap shorter than one frame");

  const Waveform ref = trim_mono(reference, len);
  const Waveform est = trim_mono(estimate, len);

  const auto ref_ceps = cepstral_frames(ref, cfg);
  const auto est_ceps = cepstral_frames(est, cfg);
  const std::size_t frames = std::min(ref_ceps.size(), est_ceps.size());

  // Reference frame energies for silence exclusion.
  const Spectrogram ref_spec = analyze(ref, cfg);
  std::vector<double> energy(frames, 0.0);
  double peak = 0.0;
  for (std::size_t n = 0; n < frames; ++n) {
    double e = 0.0;
    for (int k = 0; k < ref_spec.bins; ++k)
      e += std::norm(ref_spec.at(static_cast<int>(n), k, 0));
    energy[n] = e;
    peak = std::max(peak, e);
  }
  if (peak <= 0.0)
    throw std::invalid_argument("metrics: reference is silent");
  const double keep_above = peak * std::pow(10.0, kSilenceRelDb / 10.0);

  const double scale = 10.0 / std::numbers::ln10;
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t n = 0; n < frames; ++n) {
    if (energy[n] < keep_above) continue;
    const CepstralFrame& c = ref_ceps[n];
    const CepstralFrame& ch = est_ceps[n];
    double d = (c[0] - ch[0]) * (c[0] - ch[0]);
    for (int q = 1; q < kCepstralCoeffs; ++q)
      d += 2.0 * (c[q] - ch[q]) * (c[q] - ch[q]);
    sum += scale * std::sqrt(d);
    ++kept;
  }
  if (kept == 0)
    throw std::invalid_argument("metrics: no frames above the silence floor");
  return sum / static_cast<double>(kept);
}

double segmental_snr(const Waveform& reference, const Waveform& estimate) {
  if (reference.num_channels() != 1 || estimate.num_channels() != 1)
    throw std::invalid_argument("metrics: segmental_snr wants mono input");
  if (reference.num_samples() == 0)
    throw std::invalid_argument("metrics: empty input");
  if (reference.num_samples() != estimate.num_samples())
    throw std::invalid_argument("metrics: length mismatch");

  const std::size_t seg =
      static_cast<std::size_t>(std::lround(0.025 * reference.sample_rate));
  const std::size_t segments = reference.num_samples() / seg;
  if (segments == 0)
    throw std::invalid_argument("metrics: input shorter than one segment");

  const auto& r = reference.channels[0];
  const auto& e = estimate.channels[0];
  double sum = 0.0;
  for (std::size_t s = 0; s < segments; ++s) {
    double p_ref = 0.0, p_err = 0.0;
    for (std::size_t t = s * seg; t < (s + 1) * seg; ++t) {
      p_ref += r[t] * r[t];
      const double d = r[t] - e[t];
      p_err += d * d;
    }
    double snr;
    if (p_err == 0.0)
      snr = 35.0;
    else if (p_ref == 0.0)
      snr = -10.0;
    else
      snr = std::clamp(10.0 * std::log10(p_ref / p_err), -10.0, 35.0);
    sum += snr;
  }
  return sum / static_cast<double>(segments);
}

}  // namespace derev
