// derev/metrics.hpp

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

#ifndef DEREV_METRICS_HPP_
#define DEREV_METRICS_HPP_

#include <array>
#include <vector>

#include "derev/stft.hpp"
#include "derev/waveform.hpp"

namespace derev {

// Objective quality measures. Cepstra are real cepstra of the log
// magnitude spectrum (natural log, floored at 1e-10), truncated to
// coefficients 0..12.

constexpr int kCepstralCoeffs = 13;
using CepstralFrame = std::array<double, kCepstralCoeffs>;

// Per-STFT-frame cepstral coefficients of a mono waveform.
std::vector<CepstralFrame> cepstral_frames(const Waveform& wav,
                                           const StftConfig& cfg);

// Frame-averaged cepstral distance in dB-like units:
//   (10 / ln 10) * sqrt((c0 - c0')^2 + 2 * sum_{k=1..12} (ck - ck')^2).
// Signals are trimmed to the shorter length. Frames whose reference
// energy is more than 60 dB below the loudest reference frame are
// excluded from the average.
double cepstral_distance(const Waveform& reference, const Waveform& estimate,
                         const StftConfig& cfg);

// Mean segmental SNR over non-overlapping 25 ms segments, each segment
// clamped to [-10, 35] dB. Requires equal lengths.
double segmental_snr(const Waveform& reference, const Waveform& estimate);

}  // namespace derev

#endif  // DEREV_METRICS_HPP_
