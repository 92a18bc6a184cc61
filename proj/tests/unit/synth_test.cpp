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

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "neqm/error.hpp"
#include "neqm/stft.hpp"
#include "neqm/synth.hpp"
#include "oracles.hpp"

namespace neqm {
namespace {

TEST(TimbreTest, DefaultProfilesMatchTheirDefinition) {
  const auto p = TimbreProfile::premium();
  EXPECT_EQ(p.label, ClassLabel::kPremium);
  EXPECT_EQ(p.resonances[0], (Resonance{300, 150, 6}));
  EXPECT_EQ(p.resonances[1], (Resonance{700, 250, 4}));
  EXPECT_EQ(p.tilt_db_per_octave, -3.0);
  EXPECT_EQ(p.vibrato_depth, 0.015);
  EXPECT_EQ(p.attack_time_s, 0.06);
  EXPECT_EQ(p.noise_gain, 0.02);
  EXPECT_EQ(p.high_harmonic_decay_db_per_s, 0.0);

  const auto c = TimbreProfile::cheap();
  EXPECT_EQ(c.label, ClassLabel::kCheap);
  EXPECT_EQ(c.resonances[0], (Resonance{450, 60, 8}));
  EXPECT_EQ(c.resonances[1], (Resonance{1800, 80, 6}));
  EXPECT_EQ(c.tilt_db_per_octave, -8.0);
  EXPECT_EQ(c.vibrato_depth, 0.004);
  EXPECT_EQ(c.attack_time_s, 0.015);
  EXPECT_EQ(c.noise_gain, 0.08);
  EXPECT_EQ(c.high_harmonic_decay_db_per_s, 12.0);
  EXPECT_EQ(c.vibrato_rate_hz, p.vibrato_rate_hz);
}

TEST(TimbreTest, EnvelopeGainHandValues) {
  TimbreProfile t;
  t.resonances = {Resonance{1000, 200, 6}, Resonance{5000, 10, 0}};
  t.tilt_db_per_octave = -6.0;
  // At the fundamental the tilt contributes nothing.
  const double at_f0 = 20.0 * std::log10(t.envelope_gain(100.0, 100.0));
  EXPECT_NEAR(at_f0, 6.0 / (1.0 + 81.0), 1e-12);
  // One octave up: -6 dB tilt plus a far resonance tail.
  const double oct = 20.0 * std::log10(t.envelope_gain(200.0, 100.0));
  EXPECT_NEAR(oct, -6.0 + 6.0 / (1.0 + 64.0), 1e-12);
  // On the resonance center: full peak plus 3.32 octaves of tilt.
  const double peak = 20.0 * std::log10(t.envelope_gain(1000.0, 100.0));
  EXPECT_NEAR(peak, -6.0 * std::log2(10.0) + 6.0, 1e-12);
  // Half a bandwidth away the Lorentzian is at half height.
  const double half = 20.0 * std::log10(t.envelope_gain(1100.0, 1100.0));
  EXPECT_NEAR(half, 3.0, 1e-12);
}

TEST(TimbreTest, ValidateRejectsOutOfRangeValues) {
  auto t = TimbreProfile::premium();
  t.vibrato_depth = 0.05;
  EXPECT_THROW(t.validate(), Error);
  t = TimbreProfile::premium();
  t.resonances[0].bandwidth_hz = 0.0;
  EXPECT_THROW(t.validate(), Error);
  t = TimbreProfile::premium();
  t.noise_gain = -1.0;
  EXPECT_THROW(t.validate(), Error);
}

TEST(NoteSequenceTest, FillsTheClipWithBoundedLegatoNotes) {
  for (uint64_t seed = 0; seed < 200; ++seed) {
    const auto notes = note_sequence(seed, 3.0);
    ASSERT_GE(notes.size(), 4u);
    ASSERT_LE(notes.size(), 8u);
    double t = 0.0;
    for (const auto& n : notes) {
      EXPECT_NEAR(n.onset_s, t, 1e-12);
      EXPECT_GE(n.duration_s, 0.25 - 1e-12);
      EXPECT_LE(n.duration_s, 1.0 + 1e-12);
      EXPECT_GE(n.f0_hz, 65.0);
      EXPECT_LE(n.f0_hz, 262.0);
      if (n.has_vibrato) {
        EXPECT_GE(n.duration_s, 0.5);
      }
      t += n.duration_s;
    }
    EXPECT_NEAR(t, 3.0, 1e-9);
  }
}

TEST(NoteSequenceTest, VibratoRateAmongLongNotesIsAboutSeventyPercent) {
  int longs = 0, vib = 0;
  for (uint64_t seed = 0; seed < 500; ++seed)
    for (const auto& n : note_sequence(seed, 3.0))
      if (n.duration_s >= 0.5) {
        ++longs;
        vib += n.has_vibrato;
      }
  ASSERT_GT(longs, 500);
  EXPECT_NEAR(static_cast<double>(vib) / longs, 0.7, 0.05);
}

TEST(NoteSequenceTest, SeedingContract) {
  EXPECT_EQ(note_sequence(5, 3.0), note_sequence(5, 3.0));
  EXPECT_NE(note_sequence(5, 3.0), note_sequence(6, 3.0));
}

TEST(NoteSequenceTest, DurationLimits) {
  EXPECT_NO_THROW(note_sequence(1, 1.0));
  EXPECT_NO_THROW(note_sequence(1, 30.0));
  for (double d : {0.5, 30.5, std::nan("")}) {
    try {
      note_sequence(1, d);
      FAIL() << d;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::kInvalidDuration);
    }
  }
  EXPECT_THROW(render_clip(1, TimbreProfile::premium(), 0.9), Error);
}

TEST(RenderTest, PairedClipsShareTheNoteSequence) {
  // The sequence depends on the seed only, so both classes render the same
  // notes; check that the onsets show up in both waveforms.
  const auto notes = note_sequence(42, 3.0);
  const auto p = render_clip(42, TimbreProfile::premium(), 3.0);
  const auto c = render_clip(42, TimbreProfile::cheap(), 3.0);
  ASSERT_EQ(p.samples.size(), 48000u);
  ASSERT_EQ(c.samples.size(), 48000u);
  EXPECT_NE(p.samples, c.samples);
}

TEST(RenderTest, PeakIsNormalized) {
  for (uint64_t seed : {1u, 2u, 3u}) {
    for (const auto& prof : {TimbreProfile::premium(), TimbreProfile::cheap()}) {
      const auto a = render_clip(seed, prof, 3.0);
      double peak = 0.0;
      for (double s : a.samples) peak = std::max(peak, std::abs(s));
      EXPECT_LE(peak, 0.7 + 1e-9);
      EXPECT_NEAR(peak, 0.7, 1e-12);
    }
  }
}

TEST(RenderTest, IsDeterministic) {
  EXPECT_EQ(render_clip(9, TimbreProfile::cheap(), 2.0).samples,
            render_clip(9, TimbreProfile::cheap(), 2.0).samples);
}

TEST(RenderTest, NoiselessSteadyNoteIsHarmonic) {
  // Energy outside +/-2 bins of any harmonic, measured with the brute-force
  // DFT on windowed frames from the steady part of the note.
  for (const double f0 : {196.0, 261.63}) {
    for (auto prof : {TimbreProfile::premium(), TimbreProfile::cheap()}) {
      prof.noise_gain = 0.0;
      const std::vector<NoteSpec> notes = {{f0, 1.0, 0.0, false}};
      const auto a = render_notes(notes, prof, 1.0, 0);
      const auto win = testing::hann_reference(480);
      const double bin_hz = 16000.0 / 512.0;
      double inside = 0.0, outside = 0.0;
      for (std::size_t f = 15; f < 85; f += 5) {
        std::vector<double> frame(480);
        for (std::size_t n = 0; n < 480; ++n) frame[n] = a.samples[f * 160 + n] * win[n];
        const auto mags = testing::dft_magnitudes(frame, 512);
        for (std::size_t k = 0; k < mags.size(); ++k) {
          const double freq = k * bin_hz;
          const double nearest = std::max(1.0, std::round(freq / f0));
          const bool near = std::abs(freq - nearest * f0) <= 2.0 * bin_hz &&
                            nearest <= kHarmonics;
          (near ? inside : outside) += mags[k] * mags[k];
        }
      }
      EXPECT_LE(outside / (inside + outside), 0.01) << f0;
    }
  }
}

TEST(RenderTest, PairedSpectralSupportAgrees) {
  for (uint64_t seed = 0; seed < 4; ++seed) {
    const auto p = stft(render_clip(seed, TimbreProfile::premium(), 3.0));
    const auto c = stft(render_clip(seed, TimbreProfile::cheap(), 3.0));
    EXPECT_GE(testing::support_correlation(p.log_mag, c.log_mag), 0.9) << seed;
  }
}

TEST(RenderTest, DegenerateNoteRejected) {
  const std::vector<NoteSpec> notes = {{110.0, 0.0, 0.0, false}};
  EXPECT_THROW(render_notes(notes, TimbreProfile::premium(), 1.0, 0), Error);
}

TEST(FrameKindTest, LabelsFollowNoteBoundaries) {
  const std::vector<NoteSpec> notes = {{110.0, 0.5, 0.0, false}, {130.0, 0.5, 0.5, true}};
  const auto kinds = frame_kinds(notes, 98);
  // Frame f covers samples [160 f, 160 f + 480). Steady frames start at
  // 50 ms and end before the change at 8000 samples.
  for (std::size_t f = 0; f < kinds.size(); ++f) {
    const std::size_t a = f * 160, b = a + 480;
    FrameKind want = FrameKind::kTransition;
    if (a >= 800 && b <= 8000) want = FrameKind::kSteady;
    if (a >= 8800 && b <= 16000) want = FrameKind::kVibrato;
    EXPECT_EQ(kinds[f], want) << f;
  }
}

}  // namespace
}  // namespace neqm
