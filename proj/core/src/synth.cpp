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

#include "neqm/synth.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include "fft.hpp"
#include "neqm/error.hpp"

namespace neqm {
namespace {

constexpr double kMinNote = 0.25;
constexpr double kMaxNote = 1.0;
constexpr double kVibratoMinNote = 0.5;
constexpr double kVibratoProbability = 0.7;
constexpr int kLowestMidi = 36;   // C2, 65.4 Hz
constexpr int kHighestMidi = 60;  // C4, 261.6 Hz
constexpr double kReleaseTime = 0.02;
constexpr double kSustainDecayPerSecond = 0.4;
constexpr double kNyquistGuardHz = 7800.0;
constexpr double kFrameGuardSeconds = 0.05;

double midi_to_hz(int midi) { return 440.0 * std::pow(2.0, (midi - 69) / 12.0); }

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  // splitmix64 finalizer
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double amplitude_envelope(double t, double duration, double attack) {
  double a = 1.0;
  if (attack > 0.0 && t < attack) a = 0.5 - 0.5 * std::cos(std::numbers::pi * t / attack);
  a *= std::exp(-kSustainDecayPerSecond * t);
  const double remaining = duration - t;
  if (remaining < kReleaseTime)
    a *= 0.5 - 0.5 * std::cos(std::numbers::pi * std::max(remaining, 0.0) / kReleaseTime);
  return a;
}

}  // namespace

TimbreProfile TimbreProfile::premium() {
  TimbreProfile p;
  p.label = ClassLabel::kPremium;
  p.resonances = {Resonance{300.0, 150.0, 6.0}, Resonance{700.0, 250.0, 4.0}};
  p.tilt_db_per_octave = -3.0;
  p.vibrato_rate_hz = 5.5;
  p.vibrato_depth = 0.015;
  p.attack_time_s = 0.060;
  p.noise_gain = 0.02;
  p.high_harmonic_decay_db_per_s = 0.0;
  return p;
}

TimbreProfile TimbreProfile::cheap() {
  TimbreProfile p;
  p.label = ClassLabel::kCheap;
  p.resonances = {Resonance{450.0, 60.0, 8.0}, Resonance{1800.0, 80.0, 6.0}};
  p.tilt_db_per_octave = -8.0;
  p.vibrato_rate_hz = 5.5;
  p.vibrato_depth = 0.004;
  p.attack_time_s = 0.015;
  p.noise_gain = 0.08;
  p.high_harmonic_decay_db_per_s = 12.0;
  return p;
}

double TimbreProfile::envelope_gain(double freq_hz, double f0_hz) const {
  double db = tilt_db_per_octave * std::log2(std::max(freq_hz, f0_hz) / f0_hz);
  for (const auto& r : resonances) {
    const double x = (freq_hz - r.center_hz) / (0.5 * r.bandwidth_hz);
    db += r.gain_db / (1.0 + x * x);
  }
  return std::pow(10.0, db / 20.0);
}

void TimbreProfile::validate() const {
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(vibrato_depth >= 0.0 && vibrato_depth <= 0.03))
    throw Error(Errc::kInvalidArgument, "vibrato_depth must lie in [0, 0.03]");
  for (const auto& r : resonances)
    if (!finite(r.center_hz) || !finite(r.gain_db) || !(r.bandwidth_hz > 0.0))
      throw Error(Errc::kInvalidArgument, "resonance parameters must be finite, bandwidth > 0");
  if (!finite(tilt_db_per_octave) || !finite(noise_gain) || noise_gain < 0.0 ||
      !finite(high_harmonic_decay_db_per_s) || !(attack_time_s >= 0.0) ||
      !(vibrato_rate_hz >= 0.0))
    throw Error(Errc::kInvalidArgument, "timbre gains must be finite and non-negative");
}

std::vector<NoteSpec> note_sequence(uint64_t seed, double duration_s) {
  if (!(duration_s >= 1.0 && duration_s <= 30.0))
    throw Error(Errc::kInvalidDuration,
                "clip duration must lie in [1, 30] s, got " + std::to_string(duration_s));
  std::mt19937_64 rng(mix_seed(seed, 0));

  // 4..8 notes per 3 s, scaled with duration and kept feasible for the
  // [0.25, 1] s per-note bounds.
  const auto feasible_lo = static_cast<int>(std::ceil(duration_s / kMaxNote - 1e-9));
  const auto feasible_hi = static_cast<int>(std::floor(duration_s / kMinNote + 1e-9));
  const int lo = std::max(feasible_lo, static_cast<int>(std::lround(4.0 * duration_s / 3.0)));
  const int hi = std::max(lo, std::min(feasible_hi,
                                       static_cast<int>(std::lround(8.0 * duration_s / 3.0))));
  const int count = std::uniform_int_distribution<int>(lo, hi)(rng);

  std::vector<NoteSpec> notes;
  notes.reserve(count);
  double remaining = duration_s;
  double onset = 0.0;
  for (int i = 0; i < count; ++i) {
    const int after = count - i - 1;
    double d = remaining;
    if (after > 0) {
      const double d_lo = std::max(kMinNote, remaining - after * kMaxNote);
      const double d_hi = std::min(kMaxNote, remaining - after * kMinNote);
      d = std::uniform_real_distribution<double>(d_lo, std::max(d_lo, d_hi))(rng);
    }
    NoteSpec n;
    n.f0_hz = midi_to_hz(std::uniform_int_distribution<int>(kLowestMidi, kHighestMidi)(rng));
    n.duration_s = d;
    n.onset_s = onset;
    const bool vib_draw = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < kVibratoProbability;
    n.has_vibrato = d >= kVibratoMinNote && vib_draw;
    notes.push_back(n);
    onset += d;
    remaining -= d;
  }
  return notes;
}

AudioBuffer render_notes(const std::vector<NoteSpec>& notes, const TimbreProfile& profile,
                         double duration_s, uint64_t noise_seed) {
  profile.validate();
  const double fs = kSampleRate;
  const auto total = static_cast<std::size_t>(std::lround(duration_s * fs));
  AudioBuffer out;
  out.samples.assign(total, 0.0);

  for (std::size_t idx = 0; idx < notes.size(); ++idx) {
    const NoteSpec& note = notes[idx];
    if (!(note.duration_s > 0.0) || note.f0_hz <= 0.0)
      throw Error(Errc::kInvalidArgument, "note " + std::to_string(idx) + " is degenerate");
    const auto start = static_cast<std::size_t>(std::lround(note.onset_s * fs));
    if (start >= total) continue;
    const std::size_t len =
        std::min(total - start, static_cast<std::size_t>(std::lround(note.duration_s * fs)));
    const double depth = note.has_vibrato ? profile.vibrato_depth : 0.0;

    std::vector<double> env(len);
    for (std::size_t n = 0; n < len; ++n)
      env[n] = amplitude_envelope(n / fs, note.duration_s, profile.attack_time_s);

    for (int k = 1; k <= kHarmonics; ++k) {
      if (k * note.f0_hz * (1.0 + depth) > kNyquistGuardHz) break;
      const double extra_decay = k > 6 ? profile.high_harmonic_decay_db_per_s : 0.0;
      const double steady_gain = profile.envelope_gain(k * note.f0_hz, note.f0_hz);
      double phase = 0.0;
      for (std::size_t n = 0; n < len; ++n) {
        const double t = n / fs;
        const double f = note.f0_hz *
                         (1.0 + depth * std::sin(2.0 * std::numbers::pi * profile.vibrato_rate_hz * t));
        // The resonance envelope follows the instantaneous frequency, so
        // vibrato also modulates harmonic amplitudes.
        const double gain = depth > 0.0 ? profile.envelope_gain(k * f, note.f0_hz) : steady_gain;
        const double decay = extra_decay > 0.0 ? std::pow(10.0, -extra_decay * t / 20.0) : 1.0;
        out.samples[start + n] += gain * decay * env[n] * std::sin(phase);
        phase += 2.0 * std::numbers::pi * k * f / fs;
      }
    }

    if (profile.noise_gain > 0.0) {
      std::mt19937_64 rng(mix_seed(noise_seed, idx + 1));
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> noise(len);
      for (auto& v : noise) v = gauss(rng);
      detail::RealFft fft(len);
      std::vector<std::complex<double>> spec(fft.bins());
      fft.forward(noise, spec);
      for (std::size_t b = 0; b < spec.size(); ++b) {
        const double freq = b * fs / static_cast<double>(len);
        spec[b] *= profile.envelope_gain(std::max(freq, 1.0), note.f0_hz);
      }
      fft.inverse(spec, noise);
      const double scale = profile.noise_gain / static_cast<double>(len);
      for (std::size_t n = 0; n < len; ++n) out.samples[start + n] += scale * noise[n] * env[n];
    }
  }
  return out;
}

AudioBuffer render_clip(uint64_t seed, const TimbreProfile& profile, double duration_s) {
  const auto notes = note_sequence(seed, duration_s);
  auto audio = render_notes(notes, profile, duration_s,
                            mix_seed(seed, 100 + static_cast<uint64_t>(profile.label)));
  double peak = 0.0;
  for (double s : audio.samples) peak = std::max(peak, std::abs(s));
  if (peak > 0.0) {
    const double g = kPeakLevel / peak;
    for (double& s : audio.samples) s *= g;
  }
  return audio;
}

std::vector<FrameKind> frame_kinds(const std::vector<NoteSpec>& notes, std::size_t frames,
                                   const StftConfig& config) {
  std::vector<FrameKind> kinds(frames, FrameKind::kTransition);
  const double fs = kSampleRate;
  for (const auto& note : notes) {
    const double lo = (note.onset_s + kFrameGuardSeconds) * fs;
    const double hi = (note.onset_s + note.duration_s) * fs;
    for (std::size_t f = 0; f < frames; ++f) {
      const double a = static_cast<double>(f * config.hop);
      const double b = a + static_cast<double>(config.window_len);
      if (a >= lo && b <= hi) kinds[f] = note.has_vibrato ? FrameKind::kVibrato : FrameKind::kSteady;
    }
  }
  return kinds;
}

}  // namespace neqm
