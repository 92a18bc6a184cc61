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
#include <span>
#include <filesystem>
#include <utility>
#include <vector>

#include "neqm/stft.hpp"

namespace neqm {

struct DtwPath {
  std::vector<std::pair<std::size_t, std::size_t>> steps;
  double cost = 0.0;
};

// Euclidean distance between two frames (rows) of equal length.
double frame_distance(std::span<const double> a, std::span<const double> b);

// Classic unconstrained DTW over log-magnitude rows with steps (1,1), (1,0)
// and (0,1). Ties prefer the diagonal, then advancing a.
DtwPath dtw_align(const Grid& a, const Grid& b);
DtwPath dtw_align(const Spectrogram& a, const Spectrogram& b);

// True iff the path starts at (0,0), ends at (rows_a-1, rows_b-1) and only
// takes unit monotone steps.
bool path_is_valid(const DtwPath& path, std::size_t rows_a, std::size_t rows_b);

struct AlignedDistance {
  double mean_frame_dist = 0.0;
  double log_spectral_dist = 0.0;  // mean over the path of per-frame RMS difference
};

AlignedDistance aligned_distance(const Grid& a, const Grid& b, const DtwPath& path);
AlignedDistance aligned_distance(const Spectrogram& a, const Spectrogram& b, const DtwPath& path);

void write_path_csv(const std::filesystem::path& path, const DtwPath& dtw);

}  // namespace neqm
