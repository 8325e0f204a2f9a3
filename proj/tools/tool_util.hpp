// tools/tool_util.hpp

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

#ifndef DEREV_TOOLS_TOOL_UTIL_HPP_
#define DEREV_TOOLS_TOOL_UTIL_HPP_

#include <CLI11.hpp>
#include <filesystem>
#include <json.hpp>
#include <string>
#include <vector>

#include "derev/pipeline.hpp"
#include "derev/scene.hpp"
#include "derev/stft.hpp"
#include "derev/wav_io.hpp"
#include "derev/wpe.hpp"

namespace derev::tool {

constexpr const char* kToolVersion = "0.1.0";
constexpr const char* kModelEnvVar = "DEREV_MODEL";

// Original command line, kept for run manifests and rerun.
struct CliContext {
  std::vector<std::string> argv;
  int depth = 0;
};

// --- reusable flag groups -------------------------------------------------

struct StftFlags {
  int frame_len = 800;
  int hop = 160;
  int dft_len = 800;
  double sample_rate = 16000.0;

  void attach(CLI::App& cmd);
  StftConfig config() const;
  nlohmann::json to_json() const;
};

struct WpeFlags {
  int order = 15;       // regression order per channel
  int delay = 3;        // prediction delay in frames
  int iterations = 5;
  double variance_floor = 1e-10;
  double diag_load = 1e-8;
  int threads = 1;

  void attach(CLI::App& cmd);
  WpeConfig config() const;
  nlohmann::json to_json() const;
};

struct SceneFlags {
  std::string manifest;
  int channels = 2;
  double rir_ms = 300.0;
  double early_ms = 50.0;
  double synth_seconds = 2.0;

  void attach(CLI::App& cmd);
  SceneParams params() const;
  nlohmann::json to_json() const;
};

// --- io helpers -------------------------------------------------------------

// Writes via a temp file + rename so readers never observe partial output.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_wav_atomic(const std::filesystem::path& path, const Waveform& wav,
                      WavFormat format);

// Run manifest: tool id, the exact argv, and the resolved parameters.
void write_run_manifest(const std::filesystem::path& path,
                        const std::string& command, const CliContext& ctx,
                        const nlohmann::json& params);

// Log-magnitude heat map as a binary PGM (80 dB range below the peak),
// bins on the vertical axis with low frequencies at the bottom.
void write_spectrogram_pgm(const std::filesystem::path& path,
                           const Spectrogram& spec, int channel = 0);

// Resolves --model: explicit flag, else the DEREV_MODEL environment
// variable; throws with a usable message when required and absent.
std::filesystem::path resolve_model_path(const std::string& flag_value,
                                         bool required);

EnhanceMode parse_enhance_mode(const std::string& name);

}  // namespace derev::tool

#endif  // DEREV_TOOLS_TOOL_UTIL_HPP_
