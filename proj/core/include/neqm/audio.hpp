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

#include <filesystem>
#include <vector>

namespace neqm {

inline constexpr int kSampleRate = 16000;

struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate = kSampleRate;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// RIFF/WAVE, PCM 16-bit signed little-endian, mono, 16 kHz. Anything else is
// rejected with a FormatError that names the offending header field.
AudioBuffer read_wav(const std::filesystem::path& path);

// Samples are clipped to [-1, 1) and rounded to 16-bit.
void write_wav(const std::filesystem::path& path, const AudioBuffer& audio);

}  // namespace neqm
