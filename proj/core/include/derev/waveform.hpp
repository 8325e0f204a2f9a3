// derev/waveform.hpp

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

#ifndef DEREV_WAVEFORM_HPP_
#define DEREV_WAVEFORM_HPP_

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace derev {

// Multichannel time-domain signal. Samples are amplitudes in nominal
// [-1, 1]; all channels must have equal length.
struct Waveform {
  std::vector<std::vector<double>> channels;
  double sample_rate = 16000.0;

  int num_channels() const { return static_cast<int>(channels.size()); }
  std::size_t num_samples() const {
    return channels.empty() ? 0 : channels.front().size();
  }

  void validate() const {
    if (sample_rate <= 0.0) throw std::invalid_argument("waveform: sample_rate must be > 0");
    for (const auto& ch : channels)
      if (ch.size() != num_samples())
        throw std::invalid_argument("waveform: channels differ in length");
  }
};

inline Waveform make_mono(std::vector<double> samples, double sample_rate = 16000.0) {
  Waveform w;
  w.sample_rate = sample_rate;
  w.channels.push_back(std::move(samples));
  return w;
}

}  // namespace derev

#endif  // DEREV_WAVEFORM_HPP_
