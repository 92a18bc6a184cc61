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
#include "neqm/dtw.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "neqm/error.hpp"

namespace neqm {

double frame_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = a[k] - b[k];
    s += d * d;
  }
  return std::sqrt(s);
}

DtwPath dtw_align(const Grid& a, const Grid& b) {
  if (a.rows() == 0 || b.rows() == 0) throw Error(Errc::kEmptyInput, "dtw needs non-empty inputs");
  if (a.cols() != b.cols())
    throw Error(Errc::kShapeMismatch, "frames have " + std::to_string(a.cols()) + " and " +
                                          std::to_string(b.cols()) + " bins");
  const std::size_t n = a.rows();
  const std::size_t m = b.rows();
  const double inf = std::numeric_limits<double>::infinity();
  Grid acc(n, m, inf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double d = frame_distance(a.row(i), b.row(j));
      if (i == 0 && j == 0) {
        acc(i, j) = d;
        continue;
      }
      const double diag = (i > 0 && j > 0) ? acc(i - 1, j - 1) : inf;
      const double up = i > 0 ? acc(i - 1, j) : inf;
      const double left = j > 0 ? acc(i, j - 1) : inf;
      acc(i, j) = d + std::min(diag, std::min(up, left));
    }
  }

  DtwPath path;
  path.cost = acc(n - 1, m - 1);
  std::size_t i = n - 1;
  std::size_t j = m - 1;
  path.steps.emplace_back(i, j);
  while (i > 0 || j > 0) {
    const double diag = (i > 0 && j > 0) ? acc(i - 1, j - 1) : inf;
    const double up = i > 0 ? acc(i - 1, j) : inf;
    const double left = j > 0 ? acc(i, j - 1) : inf;
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    path.steps.emplace_back(i, j);
  }
  std::reverse(path.steps.begin(), path.steps.end());
  return path;
}

DtwPath dtw_align(const Spectrogram& a, const Spectrogram& b) {
  return dtw_align(a.log_mag, b.log_mag);
}

bool path_is_valid(const DtwPath& path, std::size_t rows_a, std::size_t rows_b) {
  if (path.steps.empty() || rows_a == 0 || rows_b == 0) return false;
  if (path.steps.front() != std::pair<std::size_t, std::size_t>{0, 0}) return false;
  if (path.steps.back() != std::pair<std::size_t, std::size_t>{rows_a - 1, rows_b - 1}) return false;
  for (std::size_t s = 1; s < path.steps.size(); ++s) {
    const auto [pi, pj] = path.steps[s - 1];
    const auto [ci, cj] = path.steps[s];
    const std::size_t di = ci - pi;
    const std::size_t dj = cj - pj;
    if (ci < pi || cj < pj || di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
  }
  return true;
}

AlignedDistance aligned_distance(const Grid& a, const Grid& b, const DtwPath& path) {
  if (a.cols() != b.cols() || !path_is_valid(path, a.rows(), b.rows()))
    throw Error(Errc::kPathMismatch, "path is not a valid alignment of the two inputs");
  AlignedDistance out;
  const auto bins = static_cast<double>(a.cols());
  for (const auto& [i, j] : path.steps) {
    const double d = frame_distance(a.row(i), b.row(j));
    out.mean_frame_dist += d;
    out.log_spectral_dist += d / std::sqrt(bins);
  }
  const auto steps = static_cast<double>(path.steps.size());
  out.mean_frame_dist /= steps;
  out.log_spectral_dist /= steps;
  return out;
}

AlignedDistance aligned_distance(const Spectrogram& a, const Spectrogram& b, const DtwPath& path) {
  return aligned_distance(a.log_mag, b.log_mag, path);
}

void write_path_csv(const std::filesystem::path& path, const DtwPath& dtw) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << "i,j\n";
  for (const auto& [i, j] : dtw.steps) out << i << ',' << j << '\n';
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

}  // namespace neqm
