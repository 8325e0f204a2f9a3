// derev/pipeline.hpp

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

#ifndef DEREV_PIPELINE_HPP_
#define DEREV_PIPELINE_HPP_

#include <string>

#include "derev/mask.hpp"
#include "derev/mlp.hpp"
#include "derev/scene.hpp"
#include "derev/stft.hpp"
#include "derev/waveform.hpp"
#include "derev/wpe.hpp"

namespace derev {

// End-to-end enhancement modes.
//
//  kProposed      masks and variance from the model: per channel the
//                 network predicts IRM_R and IRM_S; the mixture is masked
//                 with IRM_R (mixture phase kept), the variance is the
//                 floored |IRM_S-masked channel 1|^2, one weight solve,
//                 prediction, post-masking with IRM_S of channel 1, ISTFT.
//  kWpe           baseline alternating-optimization dereverberation on
//                 the raw mixture.
//  kWpeMask       kWpe followed by the model's channel-1 IRM_R.
//  kOneshotOracle kProposed with masks/variance computed from the
//                 ground-truth scene instead of the model (testing mode).
enum class EnhanceMode { kProposed, kWpe, kWpeMask, kOneshotOracle };

const char* to_string(EnhanceMode mode);

struct EnhanceOptions {
  EnhanceMode mode = EnhanceMode::kWpe;
  StftConfig stft;
  WpeConfig wpe;
  const MlpModel* model = nullptr;       // required for kProposed, kWpeMask
  const SceneTriple* oracle = nullptr;   // required for kOneshotOracle
  double mask_eps = kDefaultMaskEps;
};

// Wall-clock seconds per processing stage plus the per-bin weight-solve
// count; serializes to stable `key=value` lines.
struct StageTimings {
  double analyze_s = 0.0;
  double mask_inference_s = 0.0;
  double weight_solve_s = 0.0;
  double predict_s = 0.0;
  double istft_s = 0.0;
  double total_s = 0.0;
  long long weight_solves = 0;

  std::string to_kv_text() const;
};

// Mask pair covering every channel of the mixture spectrogram.
struct MaskPair {
  Mask irm_r;
  Mask irm_s;
};

// Runs the model on every channel of the spectrogram.
MaskPair predict_masks(const MlpModel& model, const Spectrogram& mixture);

// Masks from ground truth via the ideal-ratio definition.
MaskPair oracle_masks(const SceneTriple& scene, const Spectrogram& mixture,
                      double eps = kDefaultMaskEps);

// Enhances a mixture; output is the mono desired-signal estimate with the
// input's length and sample rate.
Waveform enhance(const Waveform& mixture, const EnhanceOptions& options);

// Same, with per-stage wall-clock timing.
Waveform time_enhance(const Waveform& mixture, const EnhanceOptions& options,
                      StageTimings* timings);

// The masked one-shot path with explicitly supplied masks; kProposed and
// kOneshotOracle are this function with different mask provenance, so
// injecting the same masks reproduces either bit for bit.
Waveform enhance_with_masks(const Spectrogram& mixture, const MaskPair& masks,
                            const EnhanceOptions& options,
                            StageTimings* timings = nullptr);

}  // namespace derev

#endif  // DEREV_PIPELINE_HPP_
