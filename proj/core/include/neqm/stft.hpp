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

#include <cstddef>
#include <vector>

#include "neqm/audio.hpp"
#include "neqm/grid.hpp"

namespace neqm {

// 512-point FFT over 30 ms periodic Hann frames with a 10 ms hop at 16 kHz.
// hop must divide window_len so the window and its square overlap-add to a
// constant.
struct StftConfig {
  std::size_t fft_size = 512;
  std::size_t window_len = 480;
  std::size_t hop = 160;
  double log_epsilon = 1e-6;

  std::size_t bins() const noexcept { return fft_size / 2 + 1; }
  double log_floor() const;
  std::size_t frames_for(std::size_t n_samples) const;
  // Throws InvalidArgument when an invariant does not hold.
  void validate() const;

  friend bool operator==(const StftConfig&, const StftConfig&) = default;
};

// log_mag(f, k) = ln(|X_f(k)| + log_epsilon); phase in (-pi, pi], 0 where
// the magnitude is exactly zero.
struct Spectrogram {
  Grid log_mag;
  Grid phase;
  StftConfig config;
  std::size_t n_samples = 0;

  std::size_t frames() const noexcept { return log_mag.rows(); }
  std::size_t bins() const noexcept { return log_mag.cols(); }

  friend bool operator==(const Spectrogram&, const Spectrogram&) = default;
};

// Additive log-magnitude weighting; equivalent to a per-cell gain of
// exp(value) on (magnitude + log_epsilon).
struct Mask {
  Grid values;

  Mask() = default;
  explicit Mask(Grid g) : values(std::move(g)) {}
  Mask(std::size_t frames, std::size_t bins) : values(frames, bins) {}

  friend bool operator==(const Mask&, const Mask&) = default;
};

std::vector<double> periodic_hann(std::size_t length);

Spectrogram stft(const AudioBuffer& audio, const StftConfig& config = {});

// Weighted overlap-add inverse using the stored phase.
AudioBuffer istft(const Spectrogram& spec);

// log_mag + mask, clamped below at ln(log_epsilon).
Spectrogram apply_mask(const Spectrogram& spec, const Mask& mask);

// Crops or zero-pads frames to exactly `frames` rows; padded rows sit at the
// log floor with zero phase.
Spectrogram fit_frames(const Spectrogram& spec, std::size_t frames);

}  // namespace neqm
