// derev/mlp.hpp

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

#ifndef DEREV_MLP_HPP_
#define DEREV_MLP_HPP_

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "derev/mask.hpp"
#include "derev/scene.hpp"
#include "derev/stft.hpp"

namespace derev {

// Dual-head mask estimator: rectified hidden layers, a sigmoid output
// layer twice the bin count wide (first half predicts the reverberant
// mask, second half the desired-speech mask), log-magnitude context
// features normalized with statistics fitted on the training set.

constexpr double kLogFloor = 1e-10;

struct MlpLayer {
  Eigen::MatrixXd weight;  // out x in
  Eigen::VectorXd bias;    // out
};

struct MlpModel {
  std::vector<MlpLayer> layers;  // hidden ReLU, last layer sigmoid
  int context = 2;               // frames on each side of the center frame
  int bins = 0;                  // K; output width is 2*K
  Eigen::VectorXd norm_mean;     // per-feature, size (2*context+1)*K
  Eigen::VectorXd norm_std;      // strictly positive

  int input_dim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.front().weight.cols());
  }
  int output_dim() const {
    return layers.empty() ? 0 : static_cast<int>(layers.back().weight.rows());
  }
  void validate() const;
};

struct TrainConfig {
  double learning_rate = 1e-3;
  double rho = 0.9;       // squared-gradient decay
  double rms_eps = 1e-8;
  int batch_size = 32;
  int epochs = 20;
  std::uint64_t seed = 0;

  void validate() const;
};

// Fresh model with the given hidden widths; weights are uniform in
// +-sqrt(6 / (fan_in + fan_out)), biases zero, seeded.
MlpModel make_mlp(int bins, int context, const std::vector<int>& hidden,
                  std::uint64_t seed);

// Per-frame features of one spectrogram channel: log(|X| + floor) of the
// frames n-context .. n+context concatenated; boundary frames replicate
// the edge. Rows are frames, width (2*context+1)*bins.
Eigen::MatrixXd build_features(const Spectrogram& spec, int channel,
                               int context);

// Column mean / standard deviation over a feature matrix; std entries are
// floored to keep them strictly positive.
std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_normalization(
    const Eigen::MatrixXd& feats);
void apply_normalization(Eigen::MatrixXd& feats, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& std);

// Per-layer activations kept for backprop.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> post;  // post[i]: output of layer i
};

// Affine -> ReLU chain with a sigmoid on the last layer; rows of `feats`
// are independent samples. Outputs are strictly inside (0, 1).
Eigen::MatrixXd forward_layers(const std::vector<MlpLayer>& layers,
                               const Eigen::MatrixXd& feats,
                               ForwardCache* cache = nullptr);

// Normalizes features with the model statistics, runs the network and
// splits the output into the two single-channel mask heads (R, S).
std::pair<Mask, Mask> forward_masks(const MlpModel& model,
                                    const Eigen::MatrixXd& raw_feats);

struct Gradients {
  std::vector<MlpLayer> layers;  // same shapes as the model
  double loss = 0.0;             // mean squared error over all entries
};

// Mean-squared-error gradients over both heads jointly.
Gradients backward(const std::vector<MlpLayer>& layers,
                   const Eigen::MatrixXd& feats,
                   const Eigen::MatrixXd& targets);

// Elementwise RMSprop: v <- rho*v + (1-rho)*g^2;
// p <- p - lr * g / (sqrt(v) + eps). State starts at zero.
struct RmspropState {
  std::vector<MlpLayer> v;
};
RmspropState make_rmsprop_state(const std::vector<MlpLayer>& layers);
void rmsprop_step(std::vector<MlpLayer>& layers, const Gradients& grads,
                  RmspropState& state, const TrainConfig& cfg);

struct TrainReport {
  std::vector<double> epoch_loss;  // full-dataset MSE after each epoch
};

// Trains on scene triples: features from the mixture's first channel,
// targets IRM_R = irm(|reverberant|, |mixture|) and
// IRM_S = irm(|clean|, |mixture|). Mini-batch RMSprop on the joint MSE;
// normalization statistics are fitted on the training features and stored
// in the model. Throws if the loss turns non-finite.
MlpModel train_mlp(const std::vector<SceneTriple>& scenes,
                   const StftConfig& stft_cfg, const TrainConfig& cfg,
                   const std::vector<int>& hidden, int context = 2,
                   TrainReport* report = nullptr);

// Versioned binary container: topology header, normalization vectors and
// layer payloads as little-endian 64-bit floats. Loading rejects unknown
// versions.
void save_mlp(const std::filesystem::path& path, const MlpModel& model);
MlpModel load_mlp(const std::filesystem::path& path);

}  // namespace derev

#endif  // DEREV_MLP_HPP_
