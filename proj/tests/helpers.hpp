// tests/helpers.hpp

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

#ifndef DEREV_TESTS_HELPERS_HPP_
#define DEREV_TESTS_HELPERS_HPP_

#include <cmath>
#include <complex>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "derev/rng.hpp"
#include "derev/scene.hpp"
#include "derev/stft.hpp"
#include "derev/waveform.hpp"
#include "derev/wpe.hpp"

namespace derev::testing {

inline Waveform random_waveform(std::uint64_t seed, std::size_t samples,
                                int channels = 1, double amplitude = 0.5,
                                double sample_rate = 16000.0) {
  Rng rng(seed);
  Waveform wav;
  wav.sample_rate = sample_rate;
  wav.channels.assign(static_cast<std::size_t>(channels),
                      std::vector<double>(samples));
  for (auto& ch : wav.channels)
    for (double& v : ch) v = rng.uniform(-amplitude, amplitude);
  return wav;
}

// Synthetic complex spectrogram with magnitudes bounded away from zero,
// so variance weighting stays well-conditioned.
inline Spectrogram random_spectrogram(std::uint64_t seed, int frames, int bins,
                                      int chans, const StftConfig& cfg,
                                      double mag_lo = 0.5, double mag_hi = 1.5) {
  Rng rng(seed);
  Spectrogram spec(frames, bins, chans);
  spec.config = cfg;
  for (auto& z : spec.data) {
    const double mag = rng.uniform(mag_lo, mag_hi);
    const double phase = rng.uniform(0.0, 6.283185307179586);
    z = std::polar(mag, phase);
  }
  return spec;
}

// A config whose bin count matches small synthetic spectrograms.
inline StftConfig tiny_config(int dft_len) {
  StftConfig cfg;
  cfg.frame_len = dft_len;
  cfg.hop = dft_len / 2;
  cfg.dft_len = dft_len;
  return cfg;
}

// Independent dense complex solver: Gaussian elimination with partial
// pivoting. Deliberately not Eigen, so library-backed solves are checked
// against a second route.
inline std::vector<std::complex<double>> solve_gauss(
    std::vector<std::vector<std::complex<double>>> a,
    std::vector<std::complex<double>> b) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    if (std::abs(a[pivot][col]) == 0.0)
      throw std::runtime_error("solve_gauss: singular matrix");
    std::swap(a[col], a[pivot]);
    std::swap(b[col], b[pivot]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const std::complex<double> f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<std::complex<double>> x(n);
  for (std::size_t row = n; row-- > 0;) {
    std::complex<double> acc = b[row];
    for (std::size_t c = row + 1; c < n; ++c) acc -= a[row][c] * x[c];
    x[row] = acc / a[row][row];
  }
  return x;
}

// Exact regression-model fixture. Desired-signal innovations occupy only
// the zero-context prefix [0, delay); beyond it the first channel follows
// the recursion with no innovation, so the normal equations reproduce the
// generating weights up to solver rounding, independent of frame count.
// Single-channel weights are built from decimated-lag polynomial roots
// inside the unit disk, keeping the innovation-free tail persistent and
// the per-bin Gram well conditioned; multichannel scenes get persistent
// excitation from the auxiliary channels instead.
struct ExactModelScene {
  Spectrogram x;         // chans-channel model-consistent spectrogram
  Spectrogram desired;   // single channel, support on frames [0, delay)
  RegressionWeights weights;
};

inline ExactModelScene make_exact_model_scene(std::uint64_t seed, int chans,
                                              int order, int delay, int frames,
                                              const StftConfig& cfg) {
  const int bins = cfg.bins();
  Rng rng(seed);

  RegressionWeights w;
  w.chans = chans;
  w.order = order;
  w.delay = delay;
  for (int k = 0; k < bins; ++k) {
    Eigen::VectorXcd g = Eigen::VectorXcd::Zero(chans * order);
    if (chans == 1) {
      // prediction sum_j c_j x(n - delay*j) from roots of a monic
      // polynomial, mapped onto lags l = delay*(j-1). Roots share one
      // radius band with stratified phases: modes decay in lockstep, so
      // the innovation-free tail keeps exciting every direction and the
      // per-bin Gram stays well conditioned.
      const int modes = 1 + (order - 1) / delay;
      std::vector<std::complex<double>> poly{1.0};
      for (int j = 0; j < modes; ++j) {
        const double phase =
            2.0 * 3.14159265358979324 * (j + 0.6 * rng.uniform()) / modes;
        const std::complex<double> root =
            std::polar(rng.uniform(0.96, 0.985), phase);
        poly.push_back(0.0);
        for (std::size_t i = poly.size() - 1; i >= 1; --i)
          poly[i] -= root * poly[i - 1];
      }
      for (int j = 1; j <= modes; ++j)
        g[delay * (j - 1)] = std::conj(-poly[static_cast<std::size_t>(j)]);
    } else {
      const double self_scale = 0.08 / order;
      const double cross_scale = 0.5 / std::sqrt((chans - 1.0) * order);
      for (int l = 0; l < order; ++l)
        g[l] = std::polar(self_scale * rng.uniform(0.2, 1.0),
                          rng.uniform(0.0, 6.283185307179586));
      for (int m = 1; m < chans; ++m)
        for (int l = 0; l < order; ++l)
          g[m * order + l] = std::polar(cross_scale * rng.uniform(0.2, 1.0),
                                        rng.uniform(0.0, 6.283185307179586));
    }
    w.g.push_back(std::move(g));
  }

  ExactModelScene scene;
  scene.desired = Spectrogram(frames, bins, 1);
  scene.desired.config = cfg;
  for (int n = 0; n < delay; ++n)
    for (int k = 0; k < bins; ++k)
      scene.desired.at(n, k, 0) = std::polar(rng.uniform(0.5, 1.5),
                                             rng.uniform(0.0, 6.283185307179586));

  Spectrogram aux;
  if (chans > 1)
    aux = random_spectrogram(seed ^ 0xabcdef12345ull, frames, bins, chans - 1, cfg);
  scene.weights = w;
  scene.x = make_mclp_scene(scene.desired, w, delay,
                            chans > 1 ? &aux : nullptr);
  return scene;
}

// Scratch directory removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("derev_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace derev::testing

#endif  // DEREV_TESTS_HELPERS_HPP_
