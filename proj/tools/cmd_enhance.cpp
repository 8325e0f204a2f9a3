// tools/cmd_enhance.cpp

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

#include <chrono>
#include <iostream>
#include <memory>

#include "commands.hpp"
#include "derev/mlp.hpp"
#include "derev/pipeline.hpp"
#include "derev/tensor_io.hpp"
#include "derev/wav_io.hpp"

namespace derev::tool {

namespace {

struct EnhanceArgs {
  std::string input;
  std::string output;
  std::string mode = "wpe";
  std::string model;
  std::string irm_r;
  std::string irm_s;
  std::string timing;
  std::string manifest;
  bool pcm16 = false;
  StftFlags stft;
  WpeFlags wpe;
};

void run_enhance(const EnhanceArgs& args, const CliContext& ctx) {
  const EnhanceMode mode = parse_enhance_mode(args.mode);
  if (mode == EnhanceMode::kOneshotOracle)
    throw std::runtime_error(
        "mode oneshot-oracle needs ground truth; use `derev eval` on a scene manifest");

  EnhanceOptions options;
  options.mode = mode;
  options.stft = args.stft.config();
  options.wpe = args.wpe.config();

  const bool external_masks = !args.irm_r.empty() || !args.irm_s.empty();
  if (external_masks) {
    if (args.irm_r.empty() || args.irm_s.empty())
      throw std::runtime_error("--irm-r and --irm-s must be given together");
    if (mode != EnhanceMode::kProposed)
      throw std::runtime_error("external masks drive the proposed path; use --mode proposed");
  }

  MlpModel model;
  const bool needs_model = (mode == EnhanceMode::kProposed && !external_masks) ||
                           mode == EnhanceMode::kWpeMask;
  const auto model_path = resolve_model_path(args.model, needs_model);
  if (needs_model) {
    model = load_mlp(model_path);
    options.model = &model;
  }

  const Waveform mixture = read_wav(args.input);
  StageTimings timings;
  Waveform out;
  if (external_masks) {
    // precomputed mask files stand in for the model's predictions
    const auto t0 = std::chrono::steady_clock::now();
    const Spectrogram mix_spec = analyze(mixture, options.stft);
    timings.analyze_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    MaskPair masks{read_mask(args.irm_r), read_mask(args.irm_s)};
    out = enhance_with_masks(mix_spec, masks, options, &timings);
    timings.total_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  } else {
    out = time_enhance(mixture, options, &timings);
  }
  write_wav_atomic(args.output, out,
                   args.pcm16 ? WavFormat::kPcm16 : WavFormat::kFloat32);

  if (!args.timing.empty()) write_text_atomic(args.timing, timings.to_kv_text());

  nlohmann::json params{{"in", args.input},
                        {"out", args.output},
                        {"mode", args.mode},
                        {"model", needs_model ? model_path.string() : ""},
                        {"irm_r", args.irm_r},
                        {"irm_s", args.irm_s},
                        {"pcm16", args.pcm16},
                        {"stft", args.stft.to_json()},
                        {"wpe", args.wpe.to_json()}};
  const std::filesystem::path manifest =
      args.manifest.empty() ? args.output + ".manifest.json" : args.manifest;
  write_run_manifest(manifest, "enhance", ctx, params);

  std::cout << "enhanced " << args.input << " -> " << args.output << " (mode "
            << args.mode << ", " << timings.total_s << " s)\n";
}

}  // namespace

void register_enhance(CLI::App& app, const CliContext& ctx) {
  auto args = std::make_shared<EnhanceArgs>();
  CLI::App* cmd = app.add_subcommand(
      "enhance", "Dereverberate (and denoise) a WAV recording");
  cmd->add_option("--in", args->input, "Input mixture WAV (any channel count)")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args->output, "Output mono WAV")->required();
  cmd->add_option("--mode", args->mode, "proposed | wpe | wpe-mask")
      ->capture_default_str()
      ->check(CLI::IsMember({"proposed", "wpe", "wpe-mask"}));
  cmd->add_option("--model", args->model,
                  "Mask model file (falls back to $DEREV_MODEL)");
  cmd->add_option("--irm-r", args->irm_r,
                  "Precomputed denoising mask file (with --irm-s, replaces the model)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--irm-s", args->irm_s,
                  "Precomputed desired-speech mask file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--timing", args->timing,
                  "Write per-stage timing as key=value text");
  cmd->add_option("--manifest", args->manifest,
                  "Run manifest path (default: <out>.manifest.json)");
  cmd->add_flag("--pcm16", args->pcm16, "Write 16-bit PCM instead of float32");
  args->stft.attach(*cmd);
  args->wpe.attach(*cmd);
  cmd->callback([args, &ctx] { run_enhance(*args, ctx); });
}

}  // namespace derev::tool
