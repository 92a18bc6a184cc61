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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "neqm/audio.hpp"
#include "neqm/error.hpp"

namespace neqm {
namespace {

uint32_t read_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::string& out, uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

[[noreturn]] void bad_field(const std::filesystem::path& path, const std::string& field,
                            const std::string& detail) {
  throw Error(Errc::kFormatError, path.string() + ": " + field + " " + detail);
}

}  // namespace

AudioBuffer read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());

  if (bytes.size() < 12) bad_field(path, "RIFF header", "truncated");
  if (std::memcmp(bytes.data(), "RIFF", 4) != 0) bad_field(path, "ChunkID", "is not 'RIFF'");
  if (std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) bad_field(path, "Format", "is not 'WAVE'");

  bool have_fmt = false;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    if (body + size > bytes.size()) {
      // Tolerate a data chunk whose declared size overruns the file; many
      // writers leave it unpatched. Other chunks must be complete.
      if (std::memcmp(chunk, "data", 4) != 0) bad_field(path, "chunk size", "overruns file");
    }
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16) bad_field(path, "fmt chunk size", "is " + std::to_string(size));
      const unsigned char* f = bytes.data() + body;
      const uint16_t audio_format = read_u16(f);
      const uint16_t channels = read_u16(f + 2);
      const uint32_t rate = read_u32(f + 4);
      const uint16_t bits = read_u16(f + 14);
      if (audio_format != 1)
        bad_field(path, "AudioFormat", "is " + std::to_string(audio_format) + ", expected 1 (PCM)");
      if (channels != 1)
        bad_field(path, "NumChannels", "is " + std::to_string(channels) + ", expected 1");
      if (rate != static_cast<uint32_t>(kSampleRate))
        bad_field(path, "SampleRate", "is " + std::to_string(rate) + ", expected 16000");
      if (bits != 16)
        bad_field(path, "BitsPerSample", "is " + std::to_string(bits) + ", expected 16");
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min<std::size_t>(size, bytes.size() - body);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) bad_field(path, "fmt chunk", "missing");
  if (data == nullptr) bad_field(path, "data chunk", "missing");

  AudioBuffer audio;
  audio.sample_rate = kSampleRate;
  audio.samples.resize(data_size / 2);
  for (std::size_t i = 0; i < audio.samples.size(); ++i) {
    const auto v = static_cast<int16_t>(read_u16(data + 2 * i));
    audio.samples[i] = static_cast<double>(v) / 32768.0;
  }
  return audio;
}

void write_wav(const std::filesystem::path& path, const AudioBuffer& audio) {
  if (audio.sample_rate != kSampleRate)
    throw Error(Errc::kSampleRateMismatch,
                "write_wav expects 16000 Hz, got " + std::to_string(audio.sample_rate));
  const auto n = static_cast<uint32_t>(audio.samples.size());
  std::string out;
  out.reserve(44 + 2 * n);
  out += "RIFF";
  put_u32(out, 36 + 2 * n);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, 1);
  put_u16(out, 1);
  put_u32(out, kSampleRate);
  put_u32(out, kSampleRate * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, 2 * n);
  for (double s : audio.samples) {
    if (!std::isfinite(s)) throw Error(Errc::kInvalidArgument, "non-finite sample");
    const double scaled = std::nearbyint(s * 32768.0);
    const auto v = static_cast<int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    put_u16(out, static_cast<uint16_t>(v));
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::kIoError, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw Error(Errc::kIoError, "short write to " + path.string());
}

}  // namespace neqm
