// tools/cmd_train.cpp

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
#include <memory>
#include <sstream>

#include "commands.hpp"
#include "derev/mlp.hpp"

namespace derev::tool {

namespace {

struct TrainArgs {
  std::string output;
  std::string loss_log;
  std::string manifest;
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double rho = 0.9;
  double rms_eps = 1e-8;
  std::uint64_t seed = 0;
  int hidden = 64;
  int layers = 3;
  int context = 2;
  SceneFlags scenes;
  StftFlags stft;
};

void run_train(const TrainArgs& args, const CliContext& ctx) {
  const auto specs = read_scene_manifest(args.scenes.manifest);
  if (specs.empty())
    throw std::runtime_error("train: manifest " + args.scenes.manifest +
                             " has no scenes");

  const SceneParams params = args.scenes.params();
  std::vector<SceneTriple> triples;
  triples.reserve(specs.size());
  for (const SceneSpec& spec : specs) triples.push_back(realize_scene(spec, params));

  TrainConfig cfg;
  cfg.epochs = args.epochs;
  cfg.batch_size = args.batch_size;
  cfg.learning_rate = args.learning_rate;
  cfg.rho = args.rho;
  cfg.rms_eps = args.rms_eps;
  cfg.seed = args.seed;

  const std::vector<int> hidden(static_cast<std::size_t>(args.layers),
                                args.hidden);
  TrainReport report;
  const MlpModel model =
      train_mlp(triples, args.stft.config(), cfg, hidden, args.context, &report);
  save_mlp(args.output, model);

  std::ostringstream csv;
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
    csv << e << "," << report.epoch_loss[e] << "\n";
  const std::filesystem::path loss_path =
      args.loss_log.empty() ? args.output + ".loss.csv" : args.loss_log;
  write_text_atomic(loss_path, csv.str());

  nlohmann::json jparams{{"out", args.output},
                         {"loss_log", loss_path.string()},
                         {"epochs", args.epochs},
                         {"batch_size", args.batch_size},
                         {"learning_rate", args.learning_rate},
                         {"rho", args.rho},
                         {"rms_eps", args.rms_eps},
                         {"seed", args.seed},
                         {"hidden", args.hidden},
                         {"layers", args.layers},
                         {"context", args.context},
                         {"scene", args.scenes.to_json()},
                         {"stft", args.stft.to_json()}};
  const std::filesystem::path manifest =
      args.manifest.empty() ? args.output + ".manifest.json" : args.manifest;
  write_run_manifest(manifest, "train", ctx, jparams);

  std::cout << "trained on " << triples.size() << " scenes, final mse "
            << report.epoch_loss.back() << ", model " << args.output << "\n";
}

}  // namespace

void register_train(CLI::App& app, const CliContext& ctx) {
  auto args = std::make_shared<TrainArgs>();
  CLI::App* cmd = app.add_subcommand(
      "train", "Train the dual-head mask model on a scene manifest");
  cmd->add_option("--out", args->output, "Output model file")->required();
  cmd->add_option("--loss-log", args->loss_log,
                  "Per-epoch loss CSV (default: <out>.loss.csv)");
  cmd->add_option("--manifest", args->manifest,
                  "Run manifest path (default: <out>.manifest.json)");
  cmd->add_option("--epochs", args->epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--batch", args->batch_size, "Mini-batch size")->capture_default_str();
  cmd->add_option("--lr", args->learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--rho", args->rho, "Squared-gradient decay")->capture_default_str();
  cmd->add_option("--rms-eps", args->rms_eps, "Update denominator epsilon")
      ->capture_default_str();
  cmd->add_option("--seed", args->seed, "Initialization and shuffle seed")
      ->capture_default_str();
  cmd->add_option("--hidden", args->hidden, "Hidden units per layer")
      ->capture_default_str();
  cmd->add_option("--layers", args->layers, "Hidden layer count")
      ->capture_default_str();
  cmd->add_option("--context", args->context, "Context frames on each side")
      ->capture_default_str();
  args->scenes.channels = 1;  // training reads the first channel only
  args->scenes.attach(*cmd);
  args->stft.attach(*cmd);
  cmd->callback([args, &ctx] { run_train(*args, ctx); });
}

}  // namespace derev::tool
