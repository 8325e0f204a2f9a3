// derev/mask.hpp

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

#ifndef DEREV_MASK_HPP_
#define DEREV_MASK_HPP_

#include "derev/stft.hpp"
#include "derev/tensor.hpp"

namespace derev {

constexpr double kDefaultMaskEps = 1e-8;

// Entrywise linear-amplitude magnitudes of a spectrogram.
RealTensor magnitude(const Spectrogram& spec);

// Ideal ratio mask: min(target / (mixture + eps), 1), entrywise. Both
// magnitude tensors must be non-negative and share a shape. Result is
// always in [0, 1].
Mask compute_irm(const RealTensor& target_mag, const RealTensor& mixture_mag,
                 double eps = kDefaultMaskEps);

// Multiplies each complex entry by the real mask value. Magnitudes scale
// by the mask; the phase of the input is preserved wherever the mask is
// positive.
Spectrogram apply_mask(const Spectrogram& spec, const Mask& mask);

// Extracts one channel of a multichannel mask.
Mask mask_channel(const Mask& mask, int channel);

}  // namespace derev

#endif  // DEREV_MASK_HPP_
