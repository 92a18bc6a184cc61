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
#include "neqm/stft.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "neqm/error.hpp"

namespace neqm {

double StftConfig::log_floor() const { return std::log(log_epsilon); }

std::size_t StftConfig::frames_for(std::size_t n_samples) const {
  if (n_samples < window_len) return 0;
  return (n_samples - window_len) / hop + 1;
}

void StftConfig::validate() const {
  if (fft_size == 0 || window_len == 0 || hop == 0)
    throw Error(Errc::kInvalidArgument, "stft sizes must be positive");
  if (window_len > fft_size)
    throw Error(Errc::kInvalidArgument, "window_len exceeds fft_size");
  if (window_len % hop != 0)
    throw Error(Errc::kInvalidArgument, "hop must divide window_len");
  if (!(log_epsilon > 0.0) || !std::isfinite(log_epsilon))
    throw Error(Errc::kInvalidArgument, "log_epsilon must be positive");
}

std::vector<double> periodic_hann(std::size_t length) {
  std::vector<double> w(length);
  for (std::size_t n = 0; n < length; ++n)
    w[n] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                static_cast<double>(length));
  return w;
}

Spectrogram stft(const AudioBuffer& audio, const StftConfig& config) {
  config.validate();
  if (audio.sample_rate != kSampleRate)
    throw Error(Errc::kSampleRateMismatch,
                "expected 16000 Hz, got " + std::to_string(audio.sample_rate));
  if (audio.samples.size() < config.window_len)
    throw Error(Errc::kTooShort, std::to_string(audio.samples.size()) +
                                     " samples is shorter than one window (" +
                                     std::to_string(config.window_len) + ")");

  const std::size_t frames = config.frames_for(audio.samples.size());
  const std::size_t bins = config.bins();
  const auto window = periodic_hann(config.window_len);
  const double floor = config.log_floor();

  Spectrogram spec{Grid(frames, bins), Grid(frames, bins), config, audio.samples.size()};
  auto& fft = detail::RealFft::cached(config.fft_size);
  std::vector<double> frame(config.fft_size, 0.0);
  std::vector<std::complex<double>> x(bins);

  for (std::size_t f = 0; f < frames; ++f) {
    const double* src = audio.samples.data() + f * config.hop;
    for (std::size_t n = 0; n < config.window_len; ++n) frame[n] = src[n] * window[n];
    fft.forward(frame, x);
    auto mag_row = spec.log_mag.row(f);
    auto phase_row = spec.phase.row(f);
    for (std::size_t k = 0; k < bins; ++k) {
      const double mag = std::abs(x[k]);
      mag_row[k] = std::max(std::log(mag + config.log_epsilon), floor);
      if (mag == 0.0) {
        phase_row[k] = 0.0;
      } else {
        const double p = std::arg(x[k]);
        phase_row[k] = (p <= -std::numbers::pi) ? std::numbers::pi : p;
      }
    }
  }
  return spec;
}

AudioBuffer istft(const Spectrogram& spec) {
  const auto& config = spec.config;
  config.validate();
  if (!spec.log_mag.same_shape(spec.phase))
    throw Error(Errc::kShapeMismatch, "log_mag and phase grids differ in shape");
  if (spec.bins() != config.bins())
    throw Error(Errc::kShapeMismatch, "grid has " + std::to_string(spec.bins()) +
                                          " bins, config implies " +
                                          std::to_string(config.bins()));

  const std::size_t frames = spec.frames();
  const std::size_t bins = config.bins();
  const auto window = periodic_hann(config.window_len);
  const std::size_t span_len =
      frames == 0 ? 0 : (frames - 1) * config.hop + config.window_len;
  std::vector<double> acc(std::max(span_len, spec.n_samples), 0.0);
  std::vector<double> norm(acc.size(), 0.0);

  auto& fft = detail::RealFft::cached(config.fft_size);
  std::vector<std::complex<double>> x(bins);
  std::vector<double> frame(config.fft_size);
  const double scale = 1.0 / static_cast<double>(config.fft_size);
  const double floor = config.log_floor();

  for (std::size_t f = 0; f < frames; ++f) {
    const auto mag_row = spec.log_mag.row(f);
    const auto phase_row = spec.phase.row(f);
    for (std::size_t k = 0; k < bins; ++k) {
      // Cells at the floor decode to exactly zero even if exp(log(eps)) != eps.
      const double mag = mag_row[k] <= floor
                             ? 0.0
                             : std::max(std::exp(mag_row[k]) - config.log_epsilon, 0.0);
      x[k] = std::polar(mag, phase_row[k]);
    }
    fft.inverse(x, frame);
    const std::size_t start = f * config.hop;
    for (std::size_t n = 0; n < config.window_len; ++n) {
      acc[start + n] += frame[n] * scale * window[n];
      norm[start + n] += window[n] * window[n];
    }
  }

  AudioBuffer out;
  out.sample_rate = kSampleRate;
  out.samples.assign(spec.n_samples, 0.0);
  for (std::size_t i = 0; i < spec.n_samples; ++i)
    if (norm[i] >= 1e-12) out.samples[i] = acc[i] / norm[i];
  return out;
}

Spectrogram apply_mask(const Spectrogram& spec, const Mask& mask) {
  if (!spec.log_mag.same_shape(mask.values))
    throw Error(Errc::kShapeMismatch,
                "mask is " + std::to_string(mask.values.rows()) + "x" +
                    std::to_string(mask.values.cols()) + ", spectrogram is " +
                    std::to_string(spec.frames()) + "x" + std::to_string(spec.bins()));
  Spectrogram out = spec;
  const double floor = spec.config.log_floor();
  auto& dst = out.log_mag.data();
  const auto& m = mask.values.data();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = std::max(dst[i] + m[i], floor);
  return out;
}

Spectrogram fit_frames(const Spectrogram& spec, std::size_t frames) {
  if (spec.frames() == frames) return spec;
  Spectrogram out{Grid(frames, spec.bins(), spec.config.log_floor()),
                  Grid(frames, spec.bins(), 0.0), spec.config, 0};
  const std::size_t keep = std::min(frames, spec.frames());
  for (std::size_t f = 0; f < keep; ++f) {
    std::copy(spec.log_mag.row(f).begin(), spec.log_mag.row(f).end(), out.log_mag.row(f).begin());
    std::copy(spec.phase.row(f).begin(), spec.phase.row(f).end(), out.phase.row(f).begin());
  }
  out.n_samples = frames == 0 ? 0 : (frames - 1) * spec.config.hop + spec.config.window_len;
  return out;
}

}  // namespace neqm
