// core/src/mask.cpp

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

#include "derev/mask.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace derev {

RealTensor magnitude(const Spectrogram& spec) {
  RealTensor mag(spec.frames, spec.bins, spec.chans);
  for (std::size_t i = 0; i < spec.data.size(); ++i)
    mag.v[i] = std::abs(spec.data[i]);
  return mag;
}

Mask compute_irm(const RealTensor& target_mag, const RealTensor& mixture_mag,
                 double eps) {
  if (!target_mag.same_shape(mixture_mag))
    throw std::invalid_argument("mask: magnitude shapes differ");
  if (eps <= 0.0) throw std::invalid_argument("mask: eps must be > 0");
  Mask mask(target_mag.frames, target_mag.bins, target_mag.chans);
  for (std::size_t i = 0; i < mask.v.size(); ++i) {
    const double t = target_mag.v[i];
    const double x = mixture_mag.v[i];
    if (t < 0.0 || x < 0.0)
      throw std::invalid_argument("mask: negative magnitude input");
    mask.v[i] = std::min(t / (x + eps), 1.0);
  }
  return mask;
}

Spectrogram apply_mask(const Spectrogram& spec, const Mask& mask) {
  if (mask.frames != spec.frames || mask.bins != spec.bins ||
      mask.chans != spec.chans)
    throw std::invalid_argument("mask: shape mismatch with spectrogram");
  Spectrogram out = spec;
  for (std::size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.v[i];
  return out;
}

Mask mask_channel(const Mask& mask, int channel) {
  if (channel < 0 || channel >= mask.chans)
    throw std::invalid_argument("mask: channel index out of range");
  Mask out(mask.frames, mask.bins, 1);
  for (int n = 0; n < mask.frames; ++n)
    for (int k = 0; k < mask.bins; ++k)
      out.at(n, k, 0) = mask.at(n, k, channel);
  return out;
}

}  // namespace derev
