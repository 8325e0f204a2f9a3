// core/src/fft.cpp

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

#include "fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>
#include <stdexcept>

namespace derev {

namespace {
// FFTW's planner is not thread-safe; execution on distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

RealDft::RealDft(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("RealDft: size must be >= 2");
  real_buf_ = fftw_alloc_real(static_cast<std::size_t>(n));
  cplx_buf_ = fftw_alloc_complex(static_cast<std::size_t>(n / 2 + 1));
  if (real_buf_ == nullptr || cplx_buf_ == nullptr)
    throw std::bad_alloc();
  std::lock_guard<std::mutex> lock(planner_mutex());
  fwd_plan_ = fftw_plan_dft_r2c_1d(n, real_buf_,
                                   static_cast<fftw_complex*>(cplx_buf_),
                                   FFTW_ESTIMATE);
  inv_plan_ = fftw_plan_dft_c2r_1d(n, static_cast<fftw_complex*>(cplx_buf_),
                                   real_buf_, FFTW_ESTIMATE);
  if (fwd_plan_ == nullptr || inv_plan_ == nullptr)
    throw std::runtime_error("RealDft: fftw plan creation failed");
}

RealDft::~RealDft() {
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(inv_plan_));
  }
  fftw_free(real_buf_);
  fftw_free(cplx_buf_);
}

void RealDft::forward(const double* in, std::complex<double>* out) {
  std::memcpy(real_buf_, in, sizeof(double) * static_cast<std::size_t>(n_));
  fftw_execute(static_cast<fftw_plan>(fwd_plan_));
  const int bins = n_ / 2 + 1;
  const auto* c = static_cast<fftw_complex*>(cplx_buf_);
  for (int k = 0; k < bins; ++k) out[k] = {c[k][0], c[k][1]};
}

void RealDft::inverse(const std::complex<double>* in, double* out) {
  const int bins = n_ / 2 + 1;
  auto* c = static_cast<fftw_complex*>(cplx_buf_);
  for (int k = 0; k < bins; ++k) {
    c[k][0] = in[k].real();
    c[k][1] = in[k].imag();
  }
  fftw_execute(static_cast<fftw_plan>(inv_plan_));
  const double scale = 1.0 / static_cast<double>(n_);
  for (int i = 0; i < n_; ++i) out[i] = real_buf_[i] * scale;
}

}  // namespace derev
