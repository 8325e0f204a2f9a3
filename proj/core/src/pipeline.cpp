// core/src/pipeline.cpp

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

#include "derev/pipeline.hpp"

#include <chrono>
#include <sstream>
#include <stdexcept>

namespace derev {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace

const char* to_string(EnhanceMode mode) {
  switch (mode) {
    case EnhanceMode::kProposed: return "proposed";
    case EnhanceMode::kWpe: return "wpe";
    case EnhanceMode::kWpeMask: return "wpe-mask";
    case EnhanceMode::kOneshotOracle: return "oneshot-oracle";
  }
  return "unknown";
}

std::string StageTimings::to_kv_text() const {
  std::ostringstream out;
  out << "analyze_s=" << analyze_s << '\n'
      << "mask_inference_s=" << mask_inference_s << '\n'
      << "weight_solve_s=" << weight_solve_s << '\n'
      << "predict_s=" << predict_s << '\n'
      << "istft_s=" << istft_s << '\n'
      << "total_s=" << total_s << '\n'
      << "weight_solves=" << weight_solves << '\n';
  return out.str();
}

MaskPair predict_masks(const MlpModel& model, const Spectrogram& mixture) {
  model.validate();
  if (model.bins != mixture.bins)
    throw std::invalid_argument(
        "pipeline: model was trained for a different bin count");
  MaskPair masks{Mask(mixture.frames, mixture.bins, mixture.chans),
                 Mask(mixture.frames, mixture.bins, mixture.chans)};
  for (int m = 0; m < mixture.chans; ++m) {
    const Eigen::MatrixXd feats = build_features(mixture, m, model.context);
    const auto [irm_r, irm_s] = forward_masks(model, feats);
    for (int n = 0; n < mixture.frames; ++n)
      for (int k = 0; k < mixture.bins; ++k) {
        masks.irm_r.at(n, k, m) = irm_r.at(n, k, 0);
        masks.irm_s.at(n, k, m) = irm_s.at(n, k, 0);
      }
  }
  return masks;
}

MaskPair oracle_masks(const SceneTriple& scene, const Spectrogram& mixture,
                      double eps) {
  const Spectrogram rev = analyze(scene.reverberant, mixture.config);
  const Spectrogram cln = analyze(scene.clean, mixture.config);
  if (!rev.same_shape(mixture) || !cln.same_shape(mixture))
    throw std::invalid_argument("pipeline: oracle scene shape mismatch");
  const RealTensor mix_mag = magnitude(mixture);
  return {compute_irm(magnitude(rev), mix_mag, eps),
          compute_irm(magnitude(cln), mix_mag, eps)};
}

Waveform enhance_with_masks(const Spectrogram& mixture, const MaskPair& masks,
                            const EnhanceOptions& options,
                            StageTimings* timings) {
  auto t0 = Clock::now();
  const Spectrogram masked = apply_mask(mixture, masks.irm_r);
  const Mask irm_s1 = mask_channel(masks.irm_s, 0);
  const Spectrogram speech_ch1 =
      apply_mask(channel_slice(mixture, 0), irm_s1);
  const VarianceMap var =
      update_variance(speech_ch1, options.wpe.variance_floor);
  if (timings != nullptr) timings->mask_inference_s += seconds_since(t0);

  WpeStats stats;
  t0 = Clock::now();
  Spectrogram desired = oneshot_wpe(masked, var, options.wpe, &stats);
  const double wpe_elapsed = seconds_since(t0);
  if (timings != nullptr) {
    timings->weight_solve_s += stats.solve_seconds;
    timings->predict_s += wpe_elapsed - stats.solve_seconds;
    timings->weight_solves += stats.weight_solves;
  }

  t0 = Clock::now();
  desired = apply_mask(desired, irm_s1);
  if (timings != nullptr) timings->mask_inference_s += seconds_since(t0);

  t0 = Clock::now();
  Waveform out = synthesize(desired);
  if (timings != nullptr) timings->istft_s += seconds_since(t0);
  return out;
}

Waveform time_enhance(const Waveform& mixture, const EnhanceOptions& options,
                      StageTimings* timings) {
  const auto start = Clock::now();
  mixture.validate();
  if (mixture.num_channels() < 1)
    throw std::invalid_argument("pipeline: mixture has no channels");
  options.wpe.validate();

  const bool needs_model = options.mode == EnhanceMode::kProposed ||
                           options.mode == EnhanceMode::kWpeMask;
  if (needs_model && options.model == nullptr)
    throw std::invalid_argument(std::string("pipeline: mode ") +
                                to_string(options.mode) + " requires a model");
  if (options.mode == EnhanceMode::kOneshotOracle && options.oracle == nullptr)
    throw std::invalid_argument(
        "pipeline: oneshot-oracle requires ground-truth scene access");

  auto t0 = Clock::now();
  const Spectrogram mix_spec = analyze(mixture, options.stft);
  if (timings != nullptr) timings->analyze_s += seconds_since(t0);

  Waveform out;
  switch (options.mode) {
    case EnhanceMode::kProposed: {
      t0 = Clock::now();
      const MaskPair masks = predict_masks(*options.model, mix_spec);
      if (timings != nullptr) timings->mask_inference_s += seconds_since(t0);
      out = enhance_with_masks(mix_spec, masks, options, timings);
      break;
    }
    case EnhanceMode::kOneshotOracle: {
      t0 = Clock::now();
      const MaskPair masks =
          oracle_masks(*options.oracle, mix_spec, options.mask_eps);
      if (timings != nullptr) timings->mask_inference_s += seconds_since(t0);
      out = enhance_with_masks(mix_spec, masks, options, timings);
      break;
    }
    case EnhanceMode::kWpe:
    case EnhanceMode::kWpeMask: {
      WpeStats stats;
      t0 = Clock::now();
      WpeResult result = iterative_wpe(mix_spec, options.wpe, nullptr, &stats);
      const double wpe_elapsed = seconds_since(t0);
      if (timings != nullptr) {
        timings->weight_solve_s += stats.solve_seconds;
        timings->predict_s += wpe_elapsed - stats.solve_seconds;
        timings->weight_solves += stats.weight_solves;
      }
      Spectrogram desired = std::move(result.desired);
      if (options.mode == EnhanceMode::kWpeMask) {
        t0 = Clock::now();
        const MaskPair masks = predict_masks(*options.model, mix_spec);
        desired = apply_mask(desired, mask_channel(masks.irm_r, 0));
        if (timings != nullptr) timings->mask_inference_s += seconds_since(t0);
      }
      t0 = Clock::now();
      out = synthesize(desired);
      if (timings != nullptr) timings->istft_s += seconds_since(t0);
      break;
    }
  }

  if (out.num_samples() != mixture.num_samples())
    throw std::runtime_error("pipeline: output length drifted from input");
  if (timings != nullptr) timings->total_s += seconds_since(start);
  return out;
}

Waveform enhance(const Waveform& mixture, const EnhanceOptions& options) {
  return time_enhance(mixture, options, nullptr);
}

}  // namespace derev
