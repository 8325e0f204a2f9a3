// core/src/wpe.cpp

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

#include "derev/wpe.hpp"

#include <chrono>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "derev/tensor_io.hpp"
#include "parallel.hpp"

namespace derev {

namespace {

using Clock = std::chrono::steady_clock;

void check_variance(const Spectrogram& spec, const VarianceMap& var) {
  if (var.frames != spec.frames || var.bins != spec.bins)
    throw std::invalid_argument("wpe: variance shape mismatch");
  for (double s : var.v)
    if (!(s > 0.0) || !std::isfinite(s))
      throw std::invalid_argument("wpe: variance entries must be positive and finite");
}

// Fills dst (chans*order entries) with the delayed context for (frame, bin);
// channel-major, lag-minor, zeros beyond the signal start.
void fill_stacked(const Spectrogram& spec, int frame, int bin, int delay,
                  int order, Eigen::VectorXcd& dst) {
  const int chans = spec.chans;
  for (int m = 0; m < chans; ++m) {
    for (int l = 0; l < order; ++l) {
      const int src = frame - delay - l;
      dst[m * order + l] =
          src >= 0 ? spec.at(src, bin, m) : std::complex<double>(0.0, 0.0);
    }
  }
}

}  // namespace

void WpeConfig::validate() const {
  if (order < 1) throw std::invalid_argument("wpe: order must be >= 1");
  if (delay < 1) throw std::invalid_argument("wpe: delay must be >= 1");
  if (iterations < 1) throw std::invalid_argument("wpe: iterations must be >= 1");
  if (!(variance_floor > 0.0))
    throw std::invalid_argument("wpe: variance_floor must be > 0");
  if (diag_load < 0.0)
    throw std::invalid_argument("wpe: diag_load must be >= 0");
}

Eigen::VectorXcd stack_delayed(const Spectrogram& spec, int frame, int bin,
                               int delay, int order) {
  if (frame < 0 || frame >= spec.frames || bin < 0 || bin >= spec.bins)
    throw std::invalid_argument("wpe: stack_delayed index out of range");
  if (delay < 1 || order < 1)
    throw std::invalid_argument("wpe: delay and order must be >= 1");
  Eigen::VectorXcd out(spec.chans * order);
  fill_stacked(spec, frame, bin, delay, order, out);
  return out;
}

RegressionWeights estimate_weights(const Spectrogram& spec,
                                   const VarianceMap& var,
                                   const WpeConfig& cfg, WpeStats* stats) {
  cfg.validate();
  if (spec.frames <= 0 || spec.chans <= 0)
    throw std::invalid_argument("wpe: empty spectrogram");
  check_variance(spec, var);

  const int taps = spec.chans * cfg.order;
  RegressionWeights weights;
  weights.chans = spec.chans;
  weights.order = cfg.order;
  weights.delay = cfg.delay;
  weights.g.assign(static_cast<std::size_t>(spec.bins), Eigen::VectorXcd());

  const auto t0 = Clock::now();
  parallel_for(spec.bins, cfg.threads, [&](int k) {
    Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(taps, taps);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(taps);
    Eigen::VectorXcd xbar(taps);
    for (int n = 0; n < spec.frames; ++n) {
      fill_stacked(spec, n, k, cfg.delay, cfg.order, xbar);
      const double w = 1.0 / var.at(n, k);
      a.selfadjointView<Eigen::Lower>().rankUpdate(xbar, w);
      b.noalias() += (w * std::conj(spec.at(n, k, 0))) * xbar;
    }
    a.template triangularView<Eigen::StrictlyUpper>() =
        a.template triangularView<Eigen::StrictlyLower>().adjoint();

    const double mean_diag = a.diagonal().real().sum() / taps;
    double load = 0.0;
    if (cfg.diag_load > 0.0)
      load = mean_diag > 0.0 ? cfg.diag_load * mean_diag : cfg.diag_load;
    a.diagonal().array() += load;

    Eigen::LDLT<Eigen::MatrixXcd> ldlt(a);
    if (load == 0.0 && !(ldlt.vectorD().cwiseAbs().maxCoeff() > 0.0))
      throw std::runtime_error(
          "wpe: rank-deficient normal equations at bin " + std::to_string(k) +
          " (diag_load = 0)");
    Eigen::VectorXcd g = ldlt.solve(b);
    if (!g.allFinite())
      throw std::runtime_error(
          "wpe: rank-deficient normal equations at bin " + std::to_string(k) +
          (load == 0.0 ? " (diag_load = 0)" : ""));
    weights.g[static_cast<std::size_t>(k)] = std::move(g);
  });

  if (stats != nullptr) {
    stats->weight_solves += spec.bins;
    stats->solve_seconds +=
        std::chrono::duration<double>(Clock::now() - t0).count();
  }
  return weights;
}

Spectrogram predict_desired(const Spectrogram& spec,
                            const RegressionWeights& weights) {
  if (weights.bins() != spec.bins)
    throw std::invalid_argument("wpe: weight bin count mismatch");
  if (weights.chans != spec.chans)
    throw std::invalid_argument("wpe: weight channel count mismatch");

  Spectrogram out(spec.frames, spec.bins, 1);
  out.config = spec.config;
  out.source_samples = spec.source_samples;

  const int order = weights.order;
  const int delay = weights.delay;
  for (int k = 0; k < spec.bins; ++k) {
    const Eigen::VectorXcd& g = weights.g[static_cast<std::size_t>(k)];
    if (g.size() != weights.taps())
      throw std::invalid_argument("wpe: weight length mismatch at bin " +
                                  std::to_string(k));
    for (int n = 0; n < spec.frames; ++n) {
      std::complex<double> pred(0.0, 0.0);
      for (int m = 0; m < spec.chans; ++m) {
        const int lmax = std::min(order, n - delay + 1);
        for (int l = 0; l < lmax; ++l)
          pred += std::conj(g[m * order + l]) * spec.at(n - delay - l, k, m);
      }
      out.at(n, k, 0) = spec.at(n, k, 0) - pred;
    }
  }
  return out;
}

VarianceMap update_variance(const Spectrogram& desired, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("wpe: floor must be > 0");
  VarianceMap var(desired.frames, desired.bins);
  for (int n = 0; n < desired.frames; ++n)
    for (int k = 0; k < desired.bins; ++k)
      var.at(n, k) = std::max(std::norm(desired.at(n, k, 0)), floor);
  return var;
}

double objective(const Spectrogram& spec, const RegressionWeights& weights,
                 const VarianceMap& var) {
  if (weights.bins() != spec.bins || weights.chans != spec.chans)
    throw std::invalid_argument("wpe: weight shape mismatch");
  check_variance(spec, var);

  const int order = weights.order;
  const int delay = weights.delay;
  double j = 0.0;
  for (int k = 0; k < spec.bins; ++k) {
    const Eigen::VectorXcd& g = weights.g[static_cast<std::size_t>(k)];
    for (int n = 0; n < spec.frames; ++n) {
      std::complex<double> pred(0.0, 0.0);
      for (int m = 0; m < spec.chans; ++m) {
        const int lmax = std::min(order, n - delay + 1);
        for (int l = 0; l < lmax; ++l)
          pred += std::conj(g[m * order + l]) * spec.at(n - delay - l, k, m);
      }
      const double s = var.at(n, k);
      j += std::log(s) + std::norm(spec.at(n, k, 0) - pred) / s;
    }
  }
  return j;
}

WpeResult iterative_wpe(const Spectrogram& spec, const WpeConfig& cfg,
                        std::vector<double>* objective_trace,
                        WpeStats* stats) {
  cfg.validate();
  WpeResult result;
  result.variance = update_variance(spec, cfg.variance_floor);
  for (int it = 0; it < cfg.iterations; ++it) {
    result.weights = estimate_weights(spec, result.variance, cfg, stats);
    result.desired = predict_desired(spec, result.weights);
    result.variance = update_variance(result.desired, cfg.variance_floor);
    if (objective_trace != nullptr)
      objective_trace->push_back(objective(spec, result.weights, result.variance));
  }
  return result;
}

Spectrogram oneshot_wpe(const Spectrogram& spec, const VarianceMap& var,
                        const WpeConfig& cfg, WpeStats* stats) {
  const RegressionWeights weights = estimate_weights(spec, var, cfg, stats);
  return predict_desired(spec, weights);
}

void write_variance(const std::filesystem::path& path, const VarianceMap& var) {
  RealTensor t(var.frames, var.bins, 1);
  t.v.assign(var.v.begin(), var.v.end());
  write_tensor(path, t);
}

void write_weights(const std::filesystem::path& path,
                   const RegressionWeights& weights) {
  RealTensor t(weights.bins(), weights.taps(), 2);
  for (int k = 0; k < weights.bins(); ++k) {
    const Eigen::VectorXcd& g = weights.g[static_cast<std::size_t>(k)];
    for (int i = 0; i < weights.taps(); ++i) {
      t.at(k, i, 0) = g[i].real();
      t.at(k, i, 1) = g[i].imag();
    }
  }
  write_tensor(path, t);
}

}  // namespace derev
