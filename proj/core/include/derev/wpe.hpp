// derev/wpe.hpp

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

#ifndef DEREV_WPE_HPP_
#define DEREV_WPE_HPP_

#include <Eigen/Dense>
#include <filesystem>
#include <vector>

#include "derev/stft.hpp"

namespace derev {

// Multichannel linear-prediction dereverberation. Late reverberation on
// channel 1 is modeled as a delayed linear regression on the past frames
// of every channel, per frequency bin; subtracting the prediction leaves
// the direct path plus early reflections.

struct WpeConfig {
  int order = 15;       // regression taps per channel (L)
  int delay = 3;        // frames skipped to protect early reflections (D)
  int iterations = 5;   // rounds of the alternating two-step loop
  double variance_floor = 1e-10;
  // Relative Tikhonov term: the solve uses A + diag_load*mean(diag(A))*I.
  // When diag(A) is all zero the load is applied as an absolute value so
  // zero data still yields the zero solution. Set to 0 for exact solves;
  // rank-deficient bins then raise an error instead of being regularized.
  double diag_load = 1e-8;
  int threads = 1;      // bins processed in parallel; results are identical

  void validate() const;
};

// Per-bin regression vectors of length chans*order, channel-major:
// [channel 1 lags 0..L-1, channel 2 lags 0..L-1, ...], lag l meaning
// frame n - delay - l.
struct RegressionWeights {
  int chans = 0;
  int order = 0;
  int delay = 0;
  std::vector<Eigen::VectorXcd> g;  // one vector per bin

  int bins() const { return static_cast<int>(g.size()); }
  int taps() const { return chans * order; }
};

// Per-(frame, bin) spectral variance of the desired signal; entries are
// kept strictly positive by construction.
struct VarianceMap {
  int frames = 0;
  int bins = 0;
  std::vector<double> v;

  VarianceMap() = default;
  VarianceMap(int n, int k, double fill = 0.0)
      : frames(n), bins(k), v(static_cast<std::size_t>(n) * k, fill) {}

  double& at(int n, int k) { return v[static_cast<std::size_t>(n) * bins + k]; }
  double at(int n, int k) const { return v[static_cast<std::size_t>(n) * bins + k]; }
};

// Counters and wall time for the weight-estimation stage, accumulated
// across calls when the same struct is passed repeatedly.
struct WpeStats {
  long long weight_solves = 0;  // one per bin per estimate_weights call
  double solve_seconds = 0.0;
};

// Delayed multichannel context vector for (frame, bin): frames
// n-delay .. n-delay-order+1 of every channel, channels concatenated.
// Out-of-range frames contribute zeros.
Eigen::VectorXcd stack_delayed(const Spectrogram& spec, int frame, int bin,
                               int delay, int order);

// Solves the per-bin weighted normal equations
//   (sum_n xbar_n xbar_n^H / var_n) g = sum_n xbar_n conj(x1_n) / var_n
// with a Hermitian LDLT factorization. Variance entries must be strictly
// positive. With diag_load = 0 a rank-deficient bin raises a
// std::runtime_error naming the bin.
RegressionWeights estimate_weights(const Spectrogram& spec,
                                   const VarianceMap& var,
                                   const WpeConfig& cfg,
                                   WpeStats* stats = nullptr);

// d(n,k) = x1(n,k) - g_k^H xbar(n-delay, k); single-channel output.
Spectrogram predict_desired(const Spectrogram& spec,
                            const RegressionWeights& weights);

// Entrywise |.|^2 of channel 1, floored. The maximum-likelihood variance
// estimate given the current desired-signal estimate.
VarianceMap update_variance(const Spectrogram& desired, double floor);

// Negative log-likelihood up to constants:
//   sum_{k,n} log var(n,k) + |x1(n,k) - g_k^H xbar(n-D,k)|^2 / var(n,k).
double objective(const Spectrogram& spec, const RegressionWeights& weights,
                 const VarianceMap& var);

struct WpeResult {
  Spectrogram desired;
  RegressionWeights weights;
  VarianceMap variance;
};

// Alternating optimization: variance initialized to floored |x1|^2, then
// `iterations` rounds of weight solve -> prediction -> variance update.
// When `objective_trace` is given, the objective is recorded after every
// round.
WpeResult iterative_wpe(const Spectrogram& spec, const WpeConfig& cfg,
                        std::vector<double>* objective_trace = nullptr,
                        WpeStats* stats = nullptr);

// Single weight solve with an externally supplied variance, then
// prediction; no iteration.
Spectrogram oneshot_wpe(const Spectrogram& spec, const VarianceMap& var,
                        const WpeConfig& cfg, WpeStats* stats = nullptr);

// Debug dumps in the flat tensor format (see tensor_io.hpp): variance as
// (frames, bins, 1); weights as (bins, taps, 2) with re/im in the last
// dimension.
void write_variance(const std::filesystem::path& path, const VarianceMap& var);
void write_weights(const std::filesystem::path& path,
                   const RegressionWeights& weights);

}  // namespace derev

#endif  // DEREV_WPE_HPP_
