// core/src/wav_io.cpp

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

#include "derev/wav_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace derev {

namespace {

static_assert(std::endian::native == std::endian::little,
              "wav_io assumes a little-endian host");

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& what) {
  throw std::runtime_error("wav: " + path.string() + ": " + what);
}

template <typename T>
T read_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

template <typename T>
void write_le(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

}  // namespace

Waveform read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");

  char tag[4];
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "RIFF", 4) != 0) fail(path, "not a RIFF file");
  read_le<std::uint32_t>(in);  // RIFF size, unused
  in.read(tag, 4);
  if (!in || std::memcmp(tag, "WAVE", 4) != 0) fail(path, "not a WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  bool have_fmt = false;
  std::vector<char> payload;

  while (in.read(tag, 4)) {
    const std::uint32_t chunk_size = read_le<std::uint32_t>(in);
    if (!in) fail(path, "truncated chunk header");
    if (std::memcmp(tag, "fmt ", 4) == 0) {
      format = read_le<std::uint16_t>(in);
      channels = read_le<std::uint16_t>(in);
      sample_rate = read_le<std::uint32_t>(in);
      read_le<std::uint32_t>(in);  // byte rate
      read_le<std::uint16_t>(in);  // block align
      bits = read_le<std::uint16_t>(in);
      if (chunk_size > 16) in.seekg(chunk_size - 16, std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(tag, "data", 4) == 0) {
      payload.resize(chunk_size);
      in.read(payload.data(), chunk_size);
      if (!in) fail(path, "truncated data chunk");
    } else {
      in.seekg(chunk_size + (chunk_size & 1u), std::ios::cur);
    }
  }

  if (!have_fmt) fail(path, "missing fmt chunk");
  if (payload.empty()) fail(path, "missing or empty data chunk");
  if (channels == 0 || sample_rate == 0) fail(path, "bad fmt chunk");

  Waveform wav;
  wav.sample_rate = static_cast<double>(sample_rate);
  wav.channels.assign(channels, {});

  if (format == kFormatPcm && bits == 16) {
    const std::size_t frames = payload.size() / (2u * channels);
    for (auto& ch : wav.channels) ch.resize(frames);
    const auto* s = reinterpret_cast<const std::int16_t*>(payload.data());
    for (std::size_t t = 0; t < frames; ++t)
      for (std::uint16_t m = 0; m < channels; ++m)
        wav.channels[m][t] = static_cast<double>(s[t * channels + m]) / 32768.0;
  } else if (format == kFormatFloat && bits == 32) {
    const std::size_t frames = payload.size() / (4u * channels);
    for (auto& ch : wav.channels) ch.resize(frames);
    const auto* s = reinterpret_cast<const float*>(payload.data());
    for (std::size_t t = 0; t < frames; ++t)
      for (std::uint16_t m = 0; m < channels; ++m)
        wav.channels[m][t] = static_cast<double>(s[t * channels + m]);
  } else {
    fail(path, "unsupported format (want 16-bit PCM or 32-bit float, got format=" +
                   std::to_string(format) + " bits=" + std::to_string(bits) + ")");
  }
  return wav;
}

void write_wav(const std::filesystem::path& path, const Waveform& wav,
               WavFormat format) {
  wav.validate();
  if (wav.num_channels() == 0) fail(path, "no channels to write");

  const std::uint16_t channels = static_cast<std::uint16_t>(wav.num_channels());
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(wav.sample_rate));
  const std::size_t frames = wav.num_samples();
  const std::uint16_t bytes_per_sample = format == WavFormat::kPcm16 ? 2 : 4;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(frames * channels * bytes_per_sample);
  const bool is_float = format == WavFormat::kFloat32;
  // float WAVs carry a fact chunk per the WAVE spec
  const std::uint32_t riff_size = 4 + (8 + 16) + (is_float ? 8 + 4 : 0) + (8 + data_size);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");

  out.write("RIFF", 4);
  write_le<std::uint32_t>(out, riff_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  write_le<std::uint32_t>(out, 16);
  write_le<std::uint16_t>(out, is_float ? kFormatFloat : kFormatPcm);
  write_le<std::uint16_t>(out, channels);
  write_le<std::uint32_t>(out, rate);
  write_le<std::uint32_t>(out, rate * channels * bytes_per_sample);
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(channels * bytes_per_sample));
  write_le<std::uint16_t>(out, static_cast<std::uint16_t>(8 * bytes_per_sample));
  if (is_float) {
    out.write("fact", 4);
    write_le<std::uint32_t>(out, 4);
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(frames));
  }
  out.write("data", 4);
  write_le<std::uint32_t>(out, data_size);

  if (format == WavFormat::kPcm16) {
    for (std::size_t t = 0; t < frames; ++t)
      for (std::uint16_t m = 0; m < channels; ++m) {
        // symmetric with the 1/32768 read normalization
        const long q = std::lround(wav.channels[m][t] * 32768.0);
        write_le<std::int16_t>(out, static_cast<std::int16_t>(
            std::clamp<long>(q, -32768, 32767)));
      }
  } else {
    for (std::size_t t = 0; t < frames; ++t)
      for (std::uint16_t m = 0; m < channels; ++m)
        write_le<float>(out, static_cast<float>(wav.channels[m][t]));
  }
  if (!out) fail(path, "write failed");
}

}  // namespace derev
