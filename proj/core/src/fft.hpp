// Copyright 2026 The neqm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace neqm::detail {

// Real-input FFT of a fixed length backed by an FFTW plan. Instances are
// not shareable across threads; use RealFft::cached() for a per-thread one.
class RealFft {
 public:
  explicit RealFft(std::size_t n);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const noexcept { return n_; }
  std::size_t bins() const noexcept { return n_ / 2 + 1; }

  // out.size() == bins()
  void forward(std::span<const double> in, std::span<std::complex<double>> out);
  // Unnormalized inverse: forward followed by inverse scales by size().
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

  static RealFft& cached(std::size_t n);

 private:
  std::size_t n_;
  double* real_ = nullptr;
  void* spec_ = nullptr;
  void* fwd_ = nullptr;
  void* inv_ = nullptr;
};

}  // namespace neqm::detail
