// tools/cmd_eval.cpp

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

#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "derev/metrics.hpp"
#include "derev/mlp.hpp"
#include "derev/pipeline.hpp"

namespace derev::tool {

namespace {

struct EvalArgs {
  std::string report;
  std::string timing;
  std::string modes = "unprocessed,wpe,oneshot-oracle";
  std::string model;
  std::string spectrogram_dir;
  std::string wav_dir;
  std::string manifest;
  SceneFlags scenes;
  StftFlags stft;
  WpeFlags wpe;
};

std::vector<std::string> split_csv(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void run_eval(const EvalArgs& args, const CliContext& ctx) {
  const auto specs = read_scene_manifest(args.scenes.manifest);
  if (specs.empty())
    throw std::runtime_error("eval: manifest " + args.scenes.manifest +
                             " has no scenes");
  const std::vector<std::string> modes = split_csv(args.modes);
  if (modes.empty()) throw std::runtime_error("eval: empty mode list");

  bool needs_model = false;
  for (const std::string& name : modes)
    if (name == "proposed" || name == "wpe-mask") needs_model = true;

  MlpModel model;
  if (needs_model) model = load_mlp(resolve_model_path(args.model, true));

  const SceneParams params = args.scenes.params();
  const StftConfig stft_cfg = args.stft.config();
  const WpeConfig wpe_cfg = args.wpe.config();

  if (!args.spectrogram_dir.empty())
    std::filesystem::create_directories(args.spectrogram_dir);
  if (!args.wav_dir.empty()) std::filesystem::create_directories(args.wav_dir);

  std::ostringstream report;
  std::ostringstream timing;
  report << "id\tmode\tcd\tsegsnr\n";
  timing << "id\tmode\tanalyze_s\tmask_inference_s\tweight_solve_s\tpredict_s"
            "\tistft_s\ttotal_s\tweight_solves\n";

  std::map<std::string, double> cd_sum;
  std::map<std::string, double> snr_sum;

  for (const SceneSpec& spec : specs) {
    const SceneTriple scene = realize_scene(spec, params);
    const Waveform clean_ch1 = make_mono(scene.clean.channels[0],
                                         scene.clean.sample_rate);

    if (!args.spectrogram_dir.empty()) {
      const std::filesystem::path dir(args.spectrogram_dir);
      write_spectrogram_pgm(dir / (spec.id + ".mixture.pgm"),
                            analyze(scene.mixture, stft_cfg));
      write_spectrogram_pgm(dir / (spec.id + ".clean.pgm"),
                            analyze(scene.clean, stft_cfg));
    }

    for (const std::string& mode_name : modes) {
      Waveform out;
      StageTimings timings;
      if (mode_name == "unprocessed") {
        out = make_mono(scene.mixture.channels[0], scene.mixture.sample_rate);
      } else {
        EnhanceOptions options;
        options.mode = parse_enhance_mode(mode_name);
        options.stft = stft_cfg;
        options.wpe = wpe_cfg;
        options.model = needs_model ? &model : nullptr;
        options.oracle = &scene;
        out = time_enhance(scene.mixture, options, &timings);
      }

      const double cd = cepstral_distance(clean_ch1, out, stft_cfg);
      const double snr = segmental_snr(clean_ch1, out);
      cd_sum[mode_name] += cd;
      snr_sum[mode_name] += snr;
      report << spec.id << '\t' << mode_name << '\t' << cd << '\t' << snr << '\n';
      timing << spec.id << '\t' << mode_name << '\t' << timings.analyze_s << '\t'
             << timings.mask_inference_s << '\t' << timings.weight_solve_s
             << '\t' << timings.predict_s << '\t' << timings.istft_s << '\t'
             << timings.total_s << '\t' << timings.weight_solves << '\n';

      if (!args.wav_dir.empty())
        write_wav_atomic(std::filesystem::path(args.wav_dir) /
                             (spec.id + "." + mode_name + ".wav"),
                         out, WavFormat::kFloat32);
      if (!args.spectrogram_dir.empty())
        write_spectrogram_pgm(std::filesystem::path(args.spectrogram_dir) /
                                  (spec.id + "." + mode_name + ".pgm"),
                              analyze(out, stft_cfg));
    }
  }

  const double count = static_cast<double>(specs.size());
  for (const std::string& mode_name : modes)
    report << "# mean\t" << mode_name << '\t' << cd_sum[mode_name] / count
           << '\t' << snr_sum[mode_name] / count << '\n';

  write_text_atomic(args.report, report.str());
  const std::filesystem::path timing_path =
      args.timing.empty() ? args.report + ".timing.tsv" : args.timing;
  write_text_atomic(timing_path, timing.str());

  nlohmann::json jparams{{"report", args.report},
                         {"timing", timing_path.string()},
                         {"modes", args.modes},
                         {"model", args.model},
                         {"spectrograms", args.spectrogram_dir},
                         {"wav_dir", args.wav_dir},
                         {"scene", args.scenes.to_json()},
                         {"stft", args.stft.to_json()},
                         {"wpe", args.wpe.to_json()}};
  const std::filesystem::path manifest =
      args.manifest.empty() ? args.report + ".manifest.json" : args.manifest;
  write_run_manifest(manifest, "eval", ctx, jparams);

  std::cout << "evaluated " << specs.size() << " scenes x " << modes.size()
            << " modes -> " << args.report << "\n";
  for (const std::string& mode_name : modes)
    std::cout << "  mean cd " << mode_name << ": " << cd_sum[mode_name] / count
              << "\n";
}

}  // namespace

void register_eval(CLI::App& app, const CliContext& ctx) {
  auto args = std::make_shared<EvalArgs>();
  CLI::App* cmd = app.add_subcommand(
      "eval", "Run enhancement modes over a corpus and score them");
  cmd->add_option("--out", args->report, "Report TSV path")->required();
  cmd->add_option("--timing", args->timing,
                  "Timing TSV path (default: <out>.timing.tsv)");
  cmd->add_option("--modes", args->modes,
                  "Comma list of unprocessed|wpe|wpe-mask|proposed|oneshot-oracle")
      ->capture_default_str();
  cmd->add_option("--model", args->model,
                  "Mask model (needed for proposed/wpe-mask; $DEREV_MODEL)");
  cmd->add_option("--spectrograms", args->spectrogram_dir,
                  "Directory for log-magnitude PGM exports");
  cmd->add_option("--wav-dir", args->wav_dir,
                  "Directory for enhanced WAV outputs");
  cmd->add_option("--manifest", args->manifest,
                  "Run manifest path (default: <out>.manifest.json)");
  args->scenes.attach(*cmd);
  args->stft.attach(*cmd);
  args->wpe.attach(*cmd);
  cmd->callback([args, &ctx] { run_eval(*args, ctx); });
}

}  // namespace derev::tool
