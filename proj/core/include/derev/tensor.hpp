// derev/tensor.hpp

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

#ifndef DEREV_TENSOR_HPP_
#define DEREV_TENSOR_HPP_

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace derev {

// Dense real tensor indexed (frame, bin, channel), row-major with channel
// fastest. Used for masks and magnitude spectrograms.
struct RealTensor {
  int frames = 0;
  int bins = 0;
  int chans = 0;
  std::vector<double> v;

  RealTensor() = default;
  RealTensor(int n, int k, int m, double fill = 0.0)
      : frames(n), bins(k), chans(m),
        v(static_cast<std::size_t>(n) * k * m, fill) {
    if (n < 0 || k < 0 || m < 0)
      throw std::invalid_argument("tensor: negative dimension");
  }

  std::size_t size() const { return v.size(); }

  std::size_t index(int n, int k, int m) const {
    return (static_cast<std::size_t>(n) * bins + k) * chans + m;
  }
  double& at(int n, int k, int m) { return v[index(n, k, m)]; }
  double at(int n, int k, int m) const { return v[index(n, k, m)]; }

  bool same_shape(const RealTensor& o) const {
    return frames == o.frames && bins == o.bins && chans == o.chans;
  }
};

// Time-frequency mask, entries in [0, 1], shape matching its companion
// spectrogram.
using Mask = RealTensor;

}  // namespace derev

#endif  // DEREV_TENSOR_HPP_
