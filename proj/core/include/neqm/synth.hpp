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

#include <array>
#include <cstdint>
#include <vector>

#include "neqm/audio.hpp"
#include "neqm/stft.hpp"

namespace neqm {

enum class ClassLabel : int { kPremium = 0, kCheap = 1 };

struct Resonance {
  double center_hz = 0.0;
  double bandwidth_hz = 1.0;
  double gain_db = 0.0;

  friend bool operator==(const Resonance&, const Resonance&) = default;
};

// Both classes share this parameterization; only the values differ.
struct TimbreProfile {
  ClassLabel label = ClassLabel::kPremium;
  std::array<Resonance, 2> resonances{};
  double tilt_db_per_octave = 0.0;
  double vibrato_rate_hz = 5.5;
  double vibrato_depth = 0.0;  // fractional f0 deviation, [0, 0.03]
  double attack_time_s = 0.05;
  double noise_gain = 0.0;
  double high_harmonic_decay_db_per_s = 0.0;  // applies above harmonic 6

  static TimbreProfile premium();
  static TimbreProfile cheap();

  // Linear gain at frequency freq_hz for a note with fundamental f0_hz.
  // Tilt is measured in octaves above f0.
  double envelope_gain(double freq_hz, double f0_hz) const;
  void validate() const;

  friend bool operator==(const TimbreProfile&, const TimbreProfile&) = default;
};

struct NoteSpec {
  double f0_hz = 110.0;  // [65, 262]
  double duration_s = 0.5;
  double onset_s = 0.0;
  bool has_vibrato = false;

  friend bool operator==(const NoteSpec&, const NoteSpec&) = default;
};

inline constexpr int kHarmonics = 16;
inline constexpr double kPeakLevel = 0.7;

// Legato note sequence filling [0, duration_s). Depends on seed only.
std::vector<NoteSpec> note_sequence(uint64_t seed, double duration_s);

// Additive rendering of a fixed note list; noise_seed drives the filtered
// noise component only.
AudioBuffer render_notes(const std::vector<NoteSpec>& notes, const TimbreProfile& profile,
                         double duration_s, uint64_t noise_seed);

// note_sequence(seed) rendered with the profile, peak-normalized to 0.7.
AudioBuffer render_clip(uint64_t seed, const TimbreProfile& profile, double duration_s);

enum class FrameKind { kTransition, kSteady, kVibrato };

// A frame is steady or vibrato only when its whole window lies inside one
// note of that kind; everything else (onsets, note changes) is a transition.
std::vector<FrameKind> frame_kinds(const std::vector<NoteSpec>& notes, std::size_t frames,
                                   const StftConfig& config = {});

}  // namespace neqm
