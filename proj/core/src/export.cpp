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
#include "neqm/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "neqm/error.hpp"

namespace neqm {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_pgm_scaled(const std::filesystem::path& path, const Grid& grid, double lo,
                      double hi, const std::vector<double>& values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << "P5\n# neqm min=" << fmt17(lo) << " max=" << fmt17(hi) << "\n"
      << grid.rows() << " " << grid.cols() << "\n255\n";
  const double range = hi - lo;
  std::string pixels(grid.size(), '\0');
  for (std::size_t y = 0; y < grid.cols(); ++y) {
    const std::size_t bin = grid.cols() - 1 - y;
    for (std::size_t x = 0; x < grid.rows(); ++x) {
      const double v = values[x * grid.cols() + bin];
      const double t = range > 0.0 ? (v - lo) / range : 0.0;
      pixels[y * grid.rows() + x] =
          static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(t, 0.0, 1.0) * 255.0)));
    }
  }
  out.write(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const Grid& grid) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    const auto row = grid.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      out << fmt17(row[c]);
    }
    out << '\n';
  }
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

Grid read_grid_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t n = 0;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw Error(Errc::kFormatError, path.string() + ": row " + std::to_string(rows + 1) +
                                            ": bad number '" + cell + "'");
      }
      ++n;
    }
    if (rows == 0) cols = n;
    if (n != cols)
      throw Error(Errc::kFormatError,
                  path.string() + ": row " + std::to_string(rows + 1) + " has " +
                      std::to_string(n) + " columns, expected " + std::to_string(cols));
    ++rows;
  }
  Grid g(rows, cols);
  g.data() = std::move(values);
  return g;
}

void write_grid_pgm(const std::filesystem::path& path, const Grid& grid) {
  if (grid.empty()) throw Error(Errc::kInvalidArgument, "cannot export an empty grid");
  const auto [lo, hi] = std::minmax_element(grid.data().begin(), grid.data().end());
  write_pgm_scaled(path, grid, *lo, *hi, grid.data());
}

Grid read_grid_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::string magic;
  std::getline(in, magic);
  if (magic != "P5") throw Error(Errc::kFormatError, path.string() + ": not a P5 greymap");
  double lo = 0.0;
  double hi = 0.0;
  bool have_scale = false;
  std::string line;
  while (in.peek() == '#') {
    std::getline(in, line);
    if (std::sscanf(line.c_str(), "# neqm min=%lf max=%lf", &lo, &hi) == 2) have_scale = true;
  }
  std::size_t width = 0;
  std::size_t height = 0;
  int maxval = 0;
  in >> width >> height >> maxval;
  in.get();
  if (!in || maxval != 255 || width == 0 || height == 0)
    throw Error(Errc::kFormatError, path.string() + ": bad greymap header");
  if (!have_scale) throw Error(Errc::kFormatError, path.string() + ": missing scale comment");
  std::string pixels(width * height, '\0');
  in.read(pixels.data(), static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
    throw Error(Errc::kFormatError, path.string() + ": truncated pixel data");

  Grid g(width, height);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) {
      const auto p = static_cast<unsigned char>(pixels[y * width + x]);
      g(x, height - 1 - y) = lo + (hi - lo) * (p / 255.0);
    }
  return g;
}

void write_signed_pgm_pair(const std::filesystem::path& prefix, const Grid& grid) {
  if (grid.empty()) throw Error(Errc::kInvalidArgument, "cannot export an empty grid");
  double peak = 0.0;
  for (double v : grid.data()) peak = std::max(peak, std::abs(v));
  std::vector<double> pos(grid.size());
  std::vector<double> neg(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pos[i] = std::max(grid.data()[i], 0.0);
    neg[i] = std::max(-grid.data()[i], 0.0);
  }
  write_pgm_scaled(prefix.string() + "_pos.pgm", grid, 0.0, peak, pos);
  write_pgm_scaled(prefix.string() + "_neg.pgm", grid, 0.0, peak, neg);
}

}  // namespace neqm
