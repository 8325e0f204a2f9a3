// derev/tensor_io.hpp

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

#ifndef DEREV_TENSOR_IO_HPP_
#define DEREV_TENSOR_IO_HPP_

#include <filesystem>

#include "derev/tensor.hpp"

namespace derev {

// Flat binary tensor container, little-endian throughout:
//   uint32 frames, uint32 bins, uint32 chans,
//   then frames*bins*chans float32 values, row-major, channel fastest.
// Masks, variance maps and regression-weight dumps all use this layout.
void write_tensor(const std::filesystem::path& path, const RealTensor& t);
RealTensor read_tensor(const std::filesystem::path& path);

// Mask files are tensor files whose payload must lie in [0, 1]; read_mask
// rejects anything else.
void write_mask(const std::filesystem::path& path, const Mask& mask);
Mask read_mask(const std::filesystem::path& path);

}  // namespace derev

#endif  // DEREV_TENSOR_IO_HPP_
