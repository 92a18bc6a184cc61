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
#include "neqm/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include "neqm/error.hpp"

namespace neqm {

std::string_view label_name(ClassLabel label) {
  return label == ClassLabel::kPremium ? "premium" : "cheap";
}

std::string_view split_name(Split split) { return split == Split::kTrain ? "train" : "test"; }

std::vector<ManifestEntry> DatasetManifest::select(Split split) const {
  std::vector<ManifestEntry> out;
  std::copy_if(entries.begin(), entries.end(), std::back_inserter(out),
               [split](const ManifestEntry& e) { return e.split == split; });
  return out;
}

std::size_t DatasetManifest::count(Split split, ClassLabel label) const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(),
      [&](const ManifestEntry& e) { return e.split == split && e.label == label; }));
}

Split split_for_sequence(int sequence_id) {
  return sequence_id % 5 == 4 ? Split::kTest : Split::kTrain;
}

uint64_t clip_seed(uint64_t dataset_seed, int sequence_id) {
  return dataset_seed * 1000003ULL + static_cast<uint64_t>(sequence_id);
}

DatasetManifest build_dataset(const DatasetConfig& config) {
  if (config.n_sequences < 20)
    throw Error(Errc::kInvalidArgument,
                "n_sequences must be >= 20, got " + std::to_string(config.n_sequences));
  if (!(config.clip_duration_s >= 1.0 && config.clip_duration_s <= 30.0))
    throw Error(Errc::kInvalidDuration, "clip duration must lie in [1, 30] s");

  std::error_code ec;
  for (const char* sub : {"premium", "cheap"}) {
    std::filesystem::create_directories(config.out_dir / sub, ec);
    if (ec) throw Error(Errc::kIoError, (config.out_dir / sub).string() + ": " + ec.message());
  }

  DatasetManifest manifest;
  manifest.root_dir = config.out_dir;
  const TimbreProfile profiles[] = {TimbreProfile::premium(), TimbreProfile::cheap()};
  for (int id = 0; id < config.n_sequences; ++id) {
    const uint64_t seed = clip_seed(config.seed, id);
    for (const auto& profile : profiles) {
      char name[32];
      std::snprintf(name, sizeof name, "seq_%04d.wav", id);
      const std::string rel = std::string(label_name(profile.label)) + "/" + name;
      write_wav(config.out_dir / rel, render_clip(seed, profile, config.clip_duration_s));
      manifest.entries.push_back({rel, profile.label, split_for_sequence(id), seed, id});
    }
  }
  write_manifest(manifest, config.out_dir / kManifestFileName);
  return manifest;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << kManifestHeader << '\n';
  for (const auto& e : manifest.entries)
    out << e.path << ',' << label_name(e.label) << ',' << split_name(e.split) << ',' << e.seed
        << ',' << e.sequence_id << '\n';
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  DatasetManifest manifest;
  manifest.root_dir = path.parent_path();

  std::string line;
  int row = 0;
  auto bad = [&](const std::string& why) {
    throw Error(Errc::kFormatError, path.string() + ": row " + std::to_string(row) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (row == 1) {
      if (line != kManifestHeader) bad("expected header '" + std::string(kManifestHeader) + "'");
      continue;
    }
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 5) bad("expected 5 columns, found " + std::to_string(cells.size()));

    ManifestEntry e;
    e.path = cells[0];
    if (e.path.empty()) bad("empty path");
    if (cells[1] == "premium") e.label = ClassLabel::kPremium;
    else if (cells[1] == "cheap") e.label = ClassLabel::kCheap;
    else bad("unknown label '" + cells[1] + "'");
    if (cells[2] == "train") e.split = Split::kTrain;
    else if (cells[2] == "test") e.split = Split::kTest;
    else bad("unknown split '" + cells[2] + "'");
    try {
      std::size_t used = 0;
      e.seed = std::stoull(cells[3], &used);
      if (used != cells[3].size()) bad("bad seed '" + cells[3] + "'");
      e.sequence_id = std::stoi(cells[4], &used);
      if (used != cells[4].size()) bad("bad sequence_id '" + cells[4] + "'");
    } catch (const std::logic_error&) {
      bad("non-numeric seed or sequence_id");
    }
    manifest.entries.push_back(std::move(e));
  }
  if (row == 0) throw Error(Errc::kFormatError, path.string() + ": empty manifest");
  return manifest;
}

}  // namespace neqm
