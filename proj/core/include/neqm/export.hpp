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

#include "neqm/grid.hpp"

namespace neqm {

// One grid row per CSV line, values printed with 17 significant digits.
void write_grid_csv(const std::filesystem::path& path, const Grid& grid);
Grid read_grid_csv(const std::filesystem::path& path);

// Binary P5 greymap. Time runs left to right and frequency bottom to top, so
// the image is grid.rows() wide and grid.cols() tall. Values are min-max
// scaled to 0..255; a header comment "# neqm min=<v> max=<v>" keeps the
// scale so read_grid_pgm can undo it up to quantization.
void write_grid_pgm(const std::filesystem::path& path, const Grid& grid);
Grid read_grid_pgm(const std::filesystem::path& path);

// Signed maps are split into <prefix>_pos.pgm (max(v,0)) and <prefix>_neg.pgm
// (max(-v,0)), both scaled over [0, max|v|].
void write_signed_pgm_pair(const std::filesystem::path& prefix, const Grid& grid);

}  // namespace neqm
