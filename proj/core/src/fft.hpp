// core/src/fft.hpp

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

#ifndef DEREV_SRC_FFT_HPP_
#define DEREV_SRC_FFT_HPP_

#include <complex>

namespace derev {

// Real-input DFT of fixed size n, wrapping FFTW3. One instance per thread:
// the execute calls reuse instance-owned buffers. Plan creation/destruction
// is serialized internally, so instances may be created concurrently.
class RealDft {
 public:
  explicit RealDft(int n);
  ~RealDft();
  RealDft(const RealDft&) = delete;
  RealDft& operator=(const RealDft&) = delete;

  int size() const { return n_; }

  // out must hold n/2 + 1 bins.
  void forward(const double* in, std::complex<double>* out);

  // Inverse of the one-sided spectrum; out holds n samples, scaled by 1/n
  // so that inverse(forward(x)) == x.
  void inverse(const std::complex<double>* in, double* out);

 private:
  int n_;
  double* real_buf_;
  void* cplx_buf_;  // fftw_complex[n/2 + 1]
  void* fwd_plan_;
  void* inv_plan_;
};

}  // namespace derev

#endif  // DEREV_SRC_FFT_HPP_
