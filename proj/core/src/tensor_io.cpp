// core/src/tensor_io.cpp

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

#include "derev/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <vector>

namespace derev {

namespace {

static_assert(std::endian::native == std::endian::little,
              "tensor_io assumes a little-endian host");

[[noreturn]] void fail(const std::filesystem::path& path, const char* what) {
  throw std::runtime_error("tensor: " + path.string() + ": " + what);
}

}  // namespace

void write_tensor(const std::filesystem::path& path, const RealTensor& t) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(path, "cannot open for writing");
  const std::uint32_t dims[3] = {static_cast<std::uint32_t>(t.frames),
                                 static_cast<std::uint32_t>(t.bins),
                                 static_cast<std::uint32_t>(t.chans)};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  std::vector<float> payload(t.v.begin(), t.v.end());
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!out) fail(path, "write failed");
}

RealTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open");
  std::uint32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in) fail(path, "truncated header");
  RealTensor t(static_cast<int>(dims[0]), static_cast<int>(dims[1]),
               static_cast<int>(dims[2]));
  std::vector<float> payload(t.size());
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(float)));
  if (!in) fail(path, "truncated payload");
  for (std::size_t i = 0; i < payload.size(); ++i)
    t.v[i] = static_cast<double>(payload[i]);
  return t;
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
  write_tensor(path, mask);
}

Mask read_mask(const std::filesystem::path& path) {
  Mask mask = read_tensor(path);
  for (double x : mask.v)
    if (!(x >= 0.0 && x <= 1.0)) fail(path, "mask value outside [0, 1]");
  return mask;
}

}  // namespace derev
