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

#include <cmath>
#include <fstream>
#include <random>

#include "gtest/gtest.h"
#include "neqm/error.hpp"
#include "neqm/export.hpp"
#include "oracles.hpp"

namespace neqm {
namespace {

TEST(ExportTest, CsvRoundTripIsBitExact) {
  std::mt19937_64 rng(1);
  Grid g = testing::random_grid(rng, 7, 5, -1e3, 1e3);
  g(0, 0) = 0.1;
  g(1, 1) = -1e-300;
  g(2, 2) = 1.0 / 3.0;
  const auto p = testing::scratch_dir("csv") / "g.csv";
  write_grid_csv(p, g);
  EXPECT_EQ(read_grid_csv(p), g);
}

TEST(ExportTest, CsvHasOneRowPerFrame) {
  const Grid g(3, 4, 1.5);
  const auto p = testing::scratch_dir("csv_rows") / "g.csv";
  write_grid_csv(p, g);
  std::ifstream in(p);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line, "1.5,1.5,1.5,1.5");
  }
  EXPECT_EQ(rows, 3);
}

TEST(ExportTest, CsvRejectsRaggedRows) {
  const auto p = testing::scratch_dir("csv_bad") / "g.csv";
  std::ofstream(p) << "1,2,3\n4,5\n";
  try {
    read_grid_csv(p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kFormatError);
    EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos) << e.what();
  }
}

TEST(ExportTest, PgmRoundTripWithinQuantization) {
  std::mt19937_64 rng(2);
  const Grid g = testing::random_grid(rng, 30, 20, -4.0, 9.0);
  const auto p = testing::scratch_dir("pgm") / "g.pgm";
  write_grid_pgm(p, g);
  const Grid back = read_grid_pgm(p);
  ASSERT_TRUE(back.same_shape(g));
  double lo = g.data()[0], hi = g.data()[0];
  for (double v : g.data()) lo = std::min(lo, v), hi = std::max(hi, v);
  const double step = (hi - lo) / 255.0;
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_LE(std::abs(back.data()[i] - g.data()[i]), 0.5 * step + 1e-12);
}

TEST(ExportTest, PgmPutsHighestBinOnTopAndFramesAcross) {
  Grid g(4, 3);  // 4 frames, 3 bins
  g(1, 2) = 1.0;  // frame 1, highest bin
  const auto p = testing::scratch_dir("pgm_orient") / "g.pgm";
  write_grid_pgm(p, g);
  const std::string bytes = testing::slurp(p);
  const std::string header_end = "\n4 3\n255\n";
  const auto pos = bytes.find(header_end);
  ASSERT_NE(pos, std::string::npos);
  const std::string pixels = bytes.substr(pos + header_end.size());
  ASSERT_EQ(pixels.size(), 12u);
  for (std::size_t i = 0; i < pixels.size(); ++i)
    EXPECT_EQ(static_cast<unsigned char>(pixels[i]), i == 1 ? 255 : 0) << i;
  EXPECT_NE(bytes.find("# neqm min=0 max=1"), std::string::npos);
}

TEST(ExportTest, SignedPairSplitsByPolarity) {
  Grid g(2, 2);
  g(0, 0) = 2.0;
  g(1, 1) = -1.0;
  const auto prefix = testing::scratch_dir("pgm_pair") / "m";
  write_signed_pgm_pair(prefix, g);
  const Grid pos = read_grid_pgm(prefix.string() + "_pos.pgm");
  const Grid neg = read_grid_pgm(prefix.string() + "_neg.pgm");
  EXPECT_DOUBLE_EQ(pos(0, 0), 2.0);
  EXPECT_DOUBLE_EQ(pos(1, 1), 0.0);
  EXPECT_DOUBLE_EQ(neg(1, 1), 2.0 * 128.0 / 255.0);  // 0.5 of the shared peak, quantized
  EXPECT_DOUBLE_EQ(neg(0, 0), 0.0);
}

TEST(ExportTest, PgmErrors) {
  const auto dir = testing::scratch_dir("pgm_err");
  EXPECT_THROW(write_grid_pgm(dir / "e.pgm", Grid()), Error);
  std::ofstream(dir / "p2.pgm") << "P2\n1 1\n255\n0\n";
  EXPECT_THROW(read_grid_pgm(dir / "p2.pgm"), Error);
  std::ofstream(dir / "noscale.pgm", std::ios::binary) << "P5\n1 1\n255\n" << '\0';
  EXPECT_THROW(read_grid_pgm(dir / "noscale.pgm"), Error);
}

}  // namespace
}  // namespace neqm
