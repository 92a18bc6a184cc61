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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "neqm/synth.hpp"

namespace neqm {

enum class Split { kTrain, kTest };

std::string_view label_name(ClassLabel label);
std::string_view split_name(Split split);

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  ClassLabel label = ClassLabel::kPremium;
  Split split = Split::kTrain;
  uint64_t seed = 0;
  int sequence_id = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::filesystem::path root_dir;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& e) const { return root_dir / e.path; }
  std::vector<ManifestEntry> select(Split split) const;
  std::size_t count(Split split, ClassLabel label) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

struct DatasetConfig {
  uint64_t seed = 1;
  int n_sequences = 50;
  double clip_duration_s = 3.0;
  std::filesystem::path out_dir;
};

inline constexpr const char* kManifestFileName = "manifest.csv";
inline constexpr const char* kManifestHeader = "path,label,split,seed,sequence_id";

// Sequence ids with id % 5 == 4 form the test split (20%).
Split split_for_sequence(int sequence_id);
uint64_t clip_seed(uint64_t dataset_seed, int sequence_id);

// Renders both classes of every sequence from the same note sequence, then
// writes <out_dir>/manifest.csv in sequence-id order.
DatasetManifest build_dataset(const DatasetConfig& config);

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
// Rows are numbered from 1 with the header as row 1; errors name the row.
DatasetManifest read_manifest(const std::filesystem::path& path);

}  // namespace neqm
