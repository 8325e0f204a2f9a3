// tools/tool_util.cpp

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

#include "tool_util.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <stdexcept>

#include "derev/mask.hpp"

namespace derev::tool {

void StftFlags::attach(CLI::App& cmd) {
  cmd.add_option("--frame-len", frame_len, "Analysis frame length in samples")
      ->capture_default_str();
  cmd.add_option("--hop", hop, "Hop size in samples; must divide the frame length")
      ->capture_default_str();
  cmd.add_option("--dft-len", dft_len, "DFT length in samples")
      ->capture_default_str();
  cmd.add_option("--sample-rate", sample_rate, "Expected input sample rate")
      ->capture_default_str();
}

StftConfig StftFlags::config() const {
  StftConfig cfg;
  cfg.frame_len = frame_len;
  cfg.hop = hop;
  cfg.dft_len = dft_len;
  cfg.sample_rate = sample_rate;
  cfg.validate();
  return cfg;
}

nlohmann::json StftFlags::to_json() const {
  return {{"frame_len", frame_len},
          {"hop", hop},
          {"dft_len", dft_len},
          {"sample_rate", sample_rate}};
}

void WpeFlags::attach(CLI::App& cmd) {
  cmd.add_option("--order", order, "Regression order per channel")
      ->capture_default_str();
  cmd.add_option("--delay", delay, "Prediction delay in frames")
      ->capture_default_str();
  cmd.add_option("--iterations", iterations,
                 "Rounds of the alternating optimization (mode wpe)")
      ->capture_default_str();
  cmd.add_option("--variance-floor", variance_floor, "Spectral variance floor")
      ->capture_default_str();
  cmd.add_option("--diag-load", diag_load,
                 "Relative diagonal loading of the normal equations")
      ->capture_default_str();
  cmd.add_option("--threads", threads, "Per-bin worker threads (0 = hardware)")
      ->capture_default_str();
}

WpeConfig WpeFlags::config() const {
  WpeConfig cfg;
  cfg.order = order;
  cfg.delay = delay;
  cfg.iterations = iterations;
  cfg.variance_floor = variance_floor;
  cfg.diag_load = diag_load;
  cfg.threads = threads;
  cfg.validate();
  return cfg;
}

nlohmann::json WpeFlags::to_json() const {
  return {{"order", order},
          {"delay", delay},
          {"iterations", iterations},
          {"variance_floor", variance_floor},
          {"diag_load", diag_load},
          {"threads", threads}};
}

void SceneFlags::attach(CLI::App& cmd) {
  cmd.add_option("--scenes", manifest,
                 "Scene manifest: one `source seed rt60 snr_db` record per line")
      ->required()
      ->check(CLI::ExistingFile);
  cmd.add_option("--channels", channels, "Microphone channels to simulate")
      ->capture_default_str();
  cmd.add_option("--rir-ms", rir_ms, "Impulse response length in ms")
      ->capture_default_str();
  cmd.add_option("--early-ms", early_ms, "Early-reflection boundary in ms")
      ->capture_default_str();
  cmd.add_option("--synth-seconds", synth_seconds,
                 "Default duration of synth: sources")
      ->capture_default_str();
}

SceneParams SceneFlags::params() const {
  SceneParams p;
  p.channels = channels;
  p.rir_ms = rir_ms;
  p.early_ms = early_ms;
  p.synth_seconds = synth_seconds;
  return p;
}

nlohmann::json SceneFlags::to_json() const {
  return {{"scenes", manifest},
          {"channels", channels},
          {"rir_ms", rir_ms},
          {"early_ms", early_ms},
          {"synth_seconds", synth_seconds}};
}

namespace {

std::filesystem::path temp_sibling(const std::filesystem::path& path) {
  return path.parent_path() /
         (path.filename().string() + ".tmp-" + std::to_string(::getpid()));
}

}  // namespace

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  const auto tmp = temp_sibling(path);
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << text;
  }
  std::filesystem::rename(tmp, path);
}

void write_wav_atomic(const std::filesystem::path& path, const Waveform& wav,
                      WavFormat format) {
  const auto tmp = temp_sibling(path);
  write_wav(tmp, wav, format);
  std::filesystem::rename(tmp, path);
}

void write_run_manifest(const std::filesystem::path& path,
                        const std::string& command, const CliContext& ctx,
                        const nlohmann::json& params) {
  nlohmann::json doc;
  doc["tool"] = "derev";
  doc["version"] = kToolVersion;
  doc["command"] = command;
  doc["argv"] = ctx.argv;
  doc["params"] = params;
  write_text_atomic(path, doc.dump(2) + "\n");
}

void write_spectrogram_pgm(const std::filesystem::path& path,
                           const Spectrogram& spec, int channel) {
  if (channel < 0 || channel >= spec.chans)
    throw std::invalid_argument("pgm: channel out of range");

  double peak_db = -1e300;
  std::vector<double> db(static_cast<std::size_t>(spec.frames) * spec.bins);
  for (int n = 0; n < spec.frames; ++n)
    for (int k = 0; k < spec.bins; ++k) {
      const double v =
          20.0 * std::log10(std::abs(spec.at(n, k, channel)) + 1e-12);
      db[static_cast<std::size_t>(n) * spec.bins + k] = v;
      peak_db = std::max(peak_db, v);
    }

  const double range = 80.0;
  std::string payload;
  payload.reserve(db.size());
  // rows top-to-bottom = high-to-low frequency
  for (int k = spec.bins - 1; k >= 0; --k)
    for (int n = 0; n < spec.frames; ++n) {
      const double v = db[static_cast<std::size_t>(n) * spec.bins + k];
      const double unit = std::clamp((v - (peak_db - range)) / range, 0.0, 1.0);
      payload.push_back(static_cast<char>(
          static_cast<unsigned char>(std::lround(unit * 255.0))));
    }

  std::string header = "P5\n" + std::to_string(spec.frames) + " " +
                       std::to_string(spec.bins) + "\n255\n";
  write_text_atomic(path, header + payload);
}

std::filesystem::path resolve_model_path(const std::string& flag_value,
                                         bool required) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv(kModelEnvVar); env != nullptr && *env != '\0')
    return env;
  if (required)
    throw std::runtime_error(
        "a model is required for this mode: pass --model or set " +
        std::string(kModelEnvVar));
  return {};
}

EnhanceMode parse_enhance_mode(const std::string& name) {
  if (name == "proposed") return EnhanceMode::kProposed;
  if (name == "wpe") return EnhanceMode::kWpe;
  if (name == "wpe-mask") return EnhanceMode::kWpeMask;
  if (name == "oneshot-oracle") return EnhanceMode::kOneshotOracle;
  throw std::runtime_error("unknown mode '" + name + "'");
}

}  // namespace derev::tool
