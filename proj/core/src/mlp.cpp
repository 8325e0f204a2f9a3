// core/src/mlp.cpp

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

#include "derev/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "derev/rng.hpp"

namespace derev {

namespace {

constexpr char kModelMagic[4] = {'D', 'R', 'V', 'M'};
constexpr std::uint32_t kModelVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "model container assumes a little-endian host");

Eigen::MatrixXd sigmoid(const Eigen::MatrixXd& z) {
  return 1.0 / (1.0 + (-z.array()).exp());
}

Spectrogram analyze_first_channel(const Waveform& wav, const StftConfig& cfg) {
  Waveform mono;
  mono.sample_rate = wav.sample_rate;
  mono.channels.push_back(wav.channels.at(0));
  return analyze(mono, cfg);
}

}  // namespace

void MlpModel::validate() const {
  if (layers.empty()) throw std::invalid_argument("mlp: no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weight.rows() != l.bias.size())
      throw std::invalid_argument("mlp: bias/weight mismatch in layer " +
                                  std::to_string(i));
    if (i > 0 && layers[i - 1].weight.rows() != l.weight.cols())
      throw std::invalid_argument("mlp: layer dimensions do not chain at layer " +
                                  std::to_string(i));
  }
  if (bins > 0 && output_dim() != 2 * bins)
    throw std::invalid_argument("mlp: output width must be 2 * bins");
  if (norm_mean.size() != input_dim() || norm_std.size() != input_dim())
    throw std::invalid_argument("mlp: normalization size mismatch");
  if ((norm_std.array() <= 0.0).any())
    throw std::invalid_argument("mlp: norm_std must be strictly positive");
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0))
    throw std::invalid_argument("train: learning_rate must be > 0");
  if (!(rho > 0.0 && rho < 1.0))
    throw std::invalid_argument("train: rho must be in (0, 1)");
  if (!(rms_eps > 0.0)) throw std::invalid_argument("train: rms_eps must be > 0");
  if (batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  if (epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
}

MlpModel make_mlp(int bins, int context, const std::vector<int>& hidden,
                  std::uint64_t seed) {
  if (bins < 1) throw std::invalid_argument("mlp: bins must be >= 1");
  if (context < 0) throw std::invalid_argument("mlp: context must be >= 0");
  for (int h : hidden)
    if (h < 1) throw std::invalid_argument("mlp: hidden width must be >= 1");

  MlpModel model;
  model.context = context;
  model.bins = bins;

  std::vector<int> dims;
  dims.push_back((2 * context + 1) * bins);
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(2 * bins);

  Rng rng(seed);
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const int fan_in = dims[i];
    const int fan_out = dims[i + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    MlpLayer layer;
    layer.weight.resize(fan_out, fan_in);
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c)
        layer.weight(r, c) = rng.uniform(-limit, limit);
    layer.bias = Eigen::VectorXd::Zero(fan_out);
    model.layers.push_back(std::move(layer));
  }
  model.norm_mean = Eigen::VectorXd::Zero(dims.front());
  model.norm_std = Eigen::VectorXd::Ones(dims.front());
  return model;
}

Eigen::MatrixXd build_features(const Spectrogram& spec, int channel,
                               int context) {
  if (spec.frames <= 0) throw std::invalid_argument("mlp: empty spectrogram");
  if (channel < 0 || channel >= spec.chans)
    throw std::invalid_argument("mlp: channel out of range");
  if (context < 0) throw std::invalid_argument("mlp: context must be >= 0");

  const int k = spec.bins;
  const int width = (2 * context + 1) * k;
  Eigen::MatrixXd feats(spec.frames, width);
  for (int n = 0; n < spec.frames; ++n) {
    for (int off = -context; off <= context; ++off) {
      const int src = std::clamp(n + off, 0, spec.frames - 1);
      const int base = (off + context) * k;
      for (int j = 0; j < k; ++j)
        feats(n, base + j) =
            std::log(std::abs(spec.at(src, j, channel)) + kLogFloor);
    }
  }
  return feats;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> fit_normalization(
    const Eigen::MatrixXd& feats) {
  if (feats.rows() == 0) throw std::invalid_argument("mlp: empty feature matrix");
  const Eigen::VectorXd mean = feats.colwise().mean();
  Eigen::VectorXd var =
      (feats.rowwise() - mean.transpose()).array().square().colwise().mean();
  Eigen::VectorXd std = var.array().sqrt().max(1e-12);
  return {mean, std};
}

void apply_normalization(Eigen::MatrixXd& feats, const Eigen::VectorXd& mean,
                         const Eigen::VectorXd& std) {
  if (feats.cols() != mean.size() || feats.cols() != std.size())
    throw std::invalid_argument("mlp: normalization size mismatch");
  feats = (feats.rowwise() - mean.transpose()).array().rowwise() /
          std.transpose().array();
}

Eigen::MatrixXd forward_layers(const std::vector<MlpLayer>& layers,
                               const Eigen::MatrixXd& feats,
                               ForwardCache* cache) {
  if (layers.empty()) throw std::invalid_argument("mlp: no layers");
  if (feats.cols() != layers.front().weight.cols())
    throw std::invalid_argument("mlp: feature width does not match first layer");

  if (cache != nullptr) cache->post.clear();
  Eigen::MatrixXd a = feats;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    Eigen::MatrixXd z = a * layers[i].weight.transpose();
    z.rowwise() += layers[i].bias.transpose();
    a = i + 1 == layers.size() ? sigmoid(z) : z.array().max(0.0).matrix();
    if (cache != nullptr) cache->post.push_back(a);
  }
  return a;
}

std::pair<Mask, Mask> forward_masks(const MlpModel& model,
                                    const Eigen::MatrixXd& raw_feats) {
  model.validate();
  Eigen::MatrixXd feats = raw_feats;
  apply_normalization(feats, model.norm_mean, model.norm_std);
  const Eigen::MatrixXd out = forward_layers(model.layers, feats);
  const int n = static_cast<int>(out.rows());
  const int k = model.bins;
  Mask irm_r(n, k, 1);
  Mask irm_s(n, k, 1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      irm_r.at(i, j, 0) = out(i, j);
      irm_s.at(i, j, 0) = out(i, k + j);
    }
  }
  return {std::move(irm_r), std::move(irm_s)};
}

Gradients backward(const std::vector<MlpLayer>& layers,
                   const Eigen::MatrixXd& feats,
                   const Eigen::MatrixXd& targets) {
  ForwardCache cache;
  const Eigen::MatrixXd out = forward_layers(layers, feats, &cache);
  if (targets.rows() != out.rows() || targets.cols() != out.cols())
    throw std::invalid_argument("mlp: target shape mismatch");

  const double denom = static_cast<double>(out.rows()) * out.cols();
  Gradients grads;
  grads.loss = (out - targets).array().square().sum() / denom;
  grads.layers.resize(layers.size());

  // Output layer: MSE through the sigmoid.
  Eigen::MatrixXd delta = (2.0 / denom) * (out - targets).array() *
                          (out.array() * (1.0 - out.array()));
  for (std::size_t i = layers.size(); i-- > 0;) {
    const Eigen::MatrixXd& input = i == 0 ? feats : cache.post[i - 1];
    grads.layers[i].weight.noalias() = delta.transpose() * input;
    grads.layers[i].bias = delta.colwise().sum();
    if (i > 0) {
      Eigen::MatrixXd back = delta * layers[i].weight;
      // ReLU gate of the previous layer
      delta = back.array() * (cache.post[i - 1].array() > 0.0).cast<double>();
    }
  }
  return grads;
}

RmspropState make_rmsprop_state(const std::vector<MlpLayer>& layers) {
  RmspropState state;
  state.v.resize(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    state.v[i].weight = Eigen::MatrixXd::Zero(layers[i].weight.rows(),
                                              layers[i].weight.cols());
    state.v[i].bias = Eigen::VectorXd::Zero(layers[i].bias.size());
  }
  return state;
}

void rmsprop_step(std::vector<MlpLayer>& layers, const Gradients& grads,
                  RmspropState& state, const TrainConfig& cfg) {
  if (grads.layers.size() != layers.size() || state.v.size() != layers.size())
    throw std::invalid_argument("mlp: rmsprop shape mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    auto& vw = state.v[i].weight;
    auto& vb = state.v[i].bias;
    const auto& gw = grads.layers[i].weight;
    const auto& gb = grads.layers[i].bias;
    vw = cfg.rho * vw.array() + (1.0 - cfg.rho) * gw.array().square();
    vb = cfg.rho * vb.array() + (1.0 - cfg.rho) * gb.array().square();
    layers[i].weight.array() -=
        cfg.learning_rate * gw.array() / (vw.array().sqrt() + cfg.rms_eps);
    layers[i].bias.array() -=
        cfg.learning_rate * gb.array() / (vb.array().sqrt() + cfg.rms_eps);
  }
}

MlpModel train_mlp(const std::vector<SceneTriple>& scenes,
                   const StftConfig& stft_cfg, const TrainConfig& cfg,
                   const std::vector<int>& hidden, int context,
                   TrainReport* report) {
  cfg.validate();
  if (scenes.empty()) throw std::invalid_argument("train: empty scene set");

  const int bins = stft_cfg.bins();

  // Stack features and IRM targets of every scene's first channel.
  std::vector<Eigen::MatrixXd> feat_blocks;
  std::vector<Eigen::MatrixXd> target_blocks;
  Eigen::Index total_rows = 0;
  for (const SceneTriple& scene : scenes) {
    const Spectrogram mix = analyze_first_channel(scene.mixture, stft_cfg);
    const Spectrogram rev = analyze_first_channel(scene.reverberant, stft_cfg);
    const Spectrogram cln = analyze_first_channel(scene.clean, stft_cfg);
    const RealTensor mix_mag = magnitude(mix);
    const Mask irm_r = compute_irm(magnitude(rev), mix_mag);
    const Mask irm_s = compute_irm(magnitude(cln), mix_mag);

    Eigen::MatrixXd targets(mix.frames, 2 * bins);
    for (int n = 0; n < mix.frames; ++n)
      for (int k = 0; k < bins; ++k) {
        targets(n, k) = irm_r.at(n, k, 0);
        targets(n, bins + k) = irm_s.at(n, k, 0);
      }
    feat_blocks.push_back(build_features(mix, 0, context));
    target_blocks.push_back(std::move(targets));
    total_rows += feat_blocks.back().rows();
  }

  const Eigen::Index width = feat_blocks.front().cols();
  Eigen::MatrixXd feats(total_rows, width);
  Eigen::MatrixXd targets(total_rows, 2 * bins);
  Eigen::Index row = 0;
  for (std::size_t i = 0; i < feat_blocks.size(); ++i) {
    feats.middleRows(row, feat_blocks[i].rows()) = feat_blocks[i];
    targets.middleRows(row, target_blocks[i].rows()) = target_blocks[i];
    row += feat_blocks[i].rows();
  }

  MlpModel model = make_mlp(bins, context, hidden, cfg.seed);
  auto [mean, stddev] = fit_normalization(feats);
  model.norm_mean = mean;
  model.norm_std = stddev;
  apply_normalization(feats, model.norm_mean, model.norm_std);

  RmspropState state = make_rmsprop_state(model.layers);
  Rng rng(cfg.seed ^ 0x5851f42d4c957f2dull);
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(total_rows));
  std::iota(perm.begin(), perm.end(), 0);

  if (report != nullptr) report->epoch_loss.clear();
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t i = perm.size(); i > 1; --i)
      std::swap(perm[i - 1],
                perm[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);

    for (Eigen::Index start = 0; start < total_rows; start += cfg.batch_size) {
      const Eigen::Index count =
          std::min<Eigen::Index>(cfg.batch_size, total_rows - start);
      Eigen::MatrixXd bx(count, width);
      Eigen::MatrixXd bt(count, 2 * bins);
      for (Eigen::Index r = 0; r < count; ++r) {
        bx.row(r) = feats.row(perm[static_cast<std::size_t>(start + r)]);
        bt.row(r) = targets.row(perm[static_cast<std::size_t>(start + r)]);
      }
      const Gradients grads = backward(model.layers, bx, bt);
      if (!std::isfinite(grads.loss))
        throw std::runtime_error(
            "train: non-finite loss at epoch " + std::to_string(epoch) +
            "; lower the learning rate or inspect the input scenes");
      rmsprop_step(model.layers, grads, state, cfg);
    }

    const Eigen::MatrixXd out = forward_layers(model.layers, feats);
    const double loss = (out - targets).array().square().sum() /
                        (static_cast<double>(out.rows()) * out.cols());
    if (!std::isfinite(loss))
      throw std::runtime_error("train: non-finite epoch loss at epoch " +
                               std::to_string(epoch));
    if (report != nullptr) report->epoch_loss.push_back(loss);
  }
  return model;
}

namespace {

template <typename T>
void write_pod(std::ostream& out, const T& value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(value));
}

template <typename T>
T read_pod(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(value));
  return value;
}

void write_vector(std::ostream& out, const Eigen::VectorXd& v) {
  write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

Eigen::VectorXd read_vector(std::istream& in) {
  const auto n = read_pod<std::uint64_t>(in);
  Eigen::VectorXd v(static_cast<Eigen::Index>(n));
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  return v;
}

}  // namespace

void save_mlp(const std::filesystem::path& path, const MlpModel& model) {
  model.validate();
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("mlp: cannot open " + path.string());
  out.write(kModelMagic, sizeof(kModelMagic));
  write_pod<std::uint32_t>(out, kModelVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.context));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.bins));
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(model.layers.size()));
  for (const MlpLayer& layer : model.layers) {
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(layer.weight.rows()));
    write_pod<std::uint64_t>(out, static_cast<std::uint64_t>(layer.weight.cols()));
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
        write_pod<double>(out, layer.weight(r, c));
    out.write(reinterpret_cast<const char*>(layer.bias.data()),
              static_cast<std::streamsize>(layer.bias.size() * sizeof(double)));
  }
  write_vector(out, model.norm_mean);
  write_vector(out, model.norm_std);
  if (!out) throw std::runtime_error("mlp: write failed: " + path.string());
}

MlpModel load_mlp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("mlp: cannot open " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kModelMagic, sizeof(magic)) != 0)
    throw std::runtime_error("mlp: " + path.string() + " is not a model file");
  const auto version = read_pod<std::uint32_t>(in);
  if (version != kModelVersion)
    throw std::runtime_error("mlp: " + path.string() + ": unsupported version " +
                             std::to_string(version));
  MlpModel model;
  model.context = static_cast<int>(read_pod<std::uint32_t>(in));
  model.bins = static_cast<int>(read_pod<std::uint32_t>(in));
  const auto layer_count = read_pod<std::uint32_t>(in);
  for (std::uint32_t i = 0; i < layer_count; ++i) {
    const auto rows = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in));
    const auto cols = static_cast<Eigen::Index>(read_pod<std::uint64_t>(in));
    MlpLayer layer;
    layer.weight.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c)
        layer.weight(r, c) = read_pod<double>(in);
    layer.bias.resize(rows);
    in.read(reinterpret_cast<char*>(layer.bias.data()),
            static_cast<std::streamsize>(rows * sizeof(double)));
    model.layers.push_back(std::move(layer));
  }
  model.norm_mean = read_vector(in);
  model.norm_std = read_vector(in);
  if (!in) throw std::runtime_error("mlp: truncated model file " + path.string());
  model.validate();
  return model;
}

}  // namespace derev
