// derev/wav_io.hpp

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

#ifndef DEREV_WAV_IO_HPP_
#define DEREV_WAV_IO_HPP_

#include <filesystem>

#include "derev/waveform.hpp"

namespace derev {

enum class WavFormat { kPcm16, kFloat32 };

// Reads a little-endian RIFF/WAVE file: 16-bit PCM or 32-bit IEEE float,
// any channel count. PCM samples are normalized to [-1, 1) by 1/32768.
Waveform read_wav(const std::filesystem::path& path);

// Writes interleaved little-endian RIFF/WAVE. PCM output is clamped to
// [-1, 1] and rounded.
void write_wav(const std::filesystem::path& path, const Waveform& wav,
               WavFormat format = WavFormat::kFloat32);

}  // namespace derev

#endif  // DEREV_WAV_IO_HPP_
