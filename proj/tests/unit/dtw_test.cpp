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
#include <random>

#include "gtest/gtest.h"
#include "neqm/dtw.hpp"
#include "neqm/error.hpp"
#include "oracles.hpp"

namespace neqm {
namespace {

TEST(FrameDistanceTest, Euclidean) {
  const std::vector<double> a = {0.0, 3.0}, b = {4.0, 0.0};
  EXPECT_EQ(frame_distance(a, b), 5.0);
  EXPECT_EQ(frame_distance(a, a), 0.0);
}

TEST(DtwTest, IdenticalInputsAlignOnTheDiagonal) {
  std::mt19937_64 rng(1);
  const Grid a = testing::random_grid(rng, 12, 5, -1.0, 1.0);
  const auto p = dtw_align(a, a);
  EXPECT_EQ(p.cost, 0.0);
  ASSERT_EQ(p.steps.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_EQ(p.steps[i], std::make_pair(i, i));
  const auto d = aligned_distance(a, a, p);
  EXPECT_EQ(d.mean_frame_dist, 0.0);
  EXPECT_EQ(d.log_spectral_dist, 0.0);
}

TEST(DtwTest, SingleFrameAgainstSequence) {
  Grid a(1, 1, 0.0);
  Grid b(3, 1);
  b(0, 0) = 1.0;
  b(1, 0) = 2.0;
  b(2, 0) = 3.0;
  const auto p = dtw_align(a, b);
  EXPECT_EQ(p.cost, 6.0);
  EXPECT_EQ(p.steps.size(), 3u);
  EXPECT_TRUE(path_is_valid(p, 1, 3));
}

TEST(DtwTest, RepeatedFrameIsAbsorbed) {
  // b is a with frame 2 duplicated; the warp should cost nothing.
  std::mt19937_64 rng(2);
  const Grid a = testing::random_grid(rng, 6, 4, 0.0, 1.0);
  Grid b(7, 4);
  for (std::size_t r = 0, s = 0; r < 7; ++r) {
    for (std::size_t k = 0; k < 4; ++k) b(r, k) = a(s, k);
    if (r != 2) ++s;
  }
  EXPECT_EQ(dtw_align(a, b).cost, 0.0);
}

TEST(DtwTest, TiesPreferTheDiagonalThenAdvancingA) {
  // All frames equal: every path costs zero, so the tie order decides.
  const Grid a(3, 2, 1.0), b(5, 2, 1.0);
  const auto p = dtw_align(a, b);
  const std::vector<std::pair<std::size_t, std::size_t>> want = {{0, 0}, {0, 1}, {0, 2}, {1, 3}, {2, 4}};
  EXPECT_EQ(p.steps, want);
  const auto q = dtw_align(b, a);
  const std::vector<std::pair<std::size_t, std::size_t>> want_t = {{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 2}};
  EXPECT_EQ(q.steps, want_t);
}

TEST(DtwTest, MatchesExhaustiveEnumeration) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> len(1, 6), bins(1, 4);
  for (int t = 0; t < 60; ++t) {
    const std::size_t k = bins(rng);
    const Grid a = testing::random_grid(rng, len(rng), k, -2.0, 2.0);
    const Grid b = testing::random_grid(rng, len(rng), k, -2.0, 2.0);
    const auto fast = dtw_align(a, b);
    const auto slow = testing::brute_force_dtw(a, b);
    EXPECT_NEAR(fast.cost, slow.cost, 1e-9 * std::max(1.0, slow.cost)) << t;
    EXPECT_TRUE(path_is_valid(fast, a.rows(), b.rows()));
    if (slow.runner_up_gap > 1e-9) {
      EXPECT_EQ(fast.steps, slow.path) << t;
    }
    double along = 0.0;
    for (const auto& [i, j] : fast.steps) along += frame_distance(a.row(i), b.row(j));
    EXPECT_NEAR(along, fast.cost, 1e-9 * std::max(1.0, along));
  }
}

TEST(DtwTest, CostIsSymmetric) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const Grid a = testing::random_grid(rng, 9, 3, 0.0, 1.0);
    const Grid b = testing::random_grid(rng, 13, 3, 0.0, 1.0);
    EXPECT_NEAR(dtw_align(a, b).cost, dtw_align(b, a).cost, 1e-12);
  }
}

TEST(DtwTest, LogSpectralDistanceIsRmsPerFrame) {
  const Grid a(4, 16, 0.0), b(4, 16, 0.5);
  const auto d = aligned_distance(a, b, dtw_align(a, b));
  EXPECT_DOUBLE_EQ(d.log_spectral_dist, 0.5);
  EXPECT_DOUBLE_EQ(d.mean_frame_dist, 2.0);
}

TEST(DtwTest, PathValidation) {
  DtwPath p;
  EXPECT_FALSE(path_is_valid(p, 2, 2));
  p.steps = {{0, 0}, {1, 1}};
  EXPECT_TRUE(path_is_valid(p, 2, 2));
  EXPECT_FALSE(path_is_valid(p, 3, 2));
  p.steps = {{0, 0}, {0, 0}, {1, 1}};
  EXPECT_FALSE(path_is_valid(p, 2, 2));
  p.steps = {{0, 0}, {2, 1}};
  EXPECT_FALSE(path_is_valid(p, 3, 2));
  p.steps = {{0, 1}, {1, 1}};
  EXPECT_FALSE(path_is_valid(p, 2, 2));
}

TEST(DtwTest, Errors) {
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::kIoError;
  };
  EXPECT_EQ(code([] { dtw_align(Grid(0, 3), Grid(2, 3)); }), Errc::kEmptyInput);
  EXPECT_EQ(code([] { dtw_align(Grid(2, 3), Grid(2, 4)); }), Errc::kShapeMismatch);
  DtwPath bad;
  bad.steps = {{0, 0}};
  EXPECT_EQ(code([&] { aligned_distance(Grid(2, 3), Grid(2, 3), bad); }), Errc::kPathMismatch);
}

TEST(DtwTest, PathCsv) {
  DtwPath p;
  p.steps = {{0, 0}, {1, 0}, {2, 1}};
  const auto f = testing::scratch_dir("dtw") / "p.csv";
  write_path_csv(f, p);
  EXPECT_EQ(testing::slurp(f), "i,j\n0,0\n1,0\n2,1\n");
}

}  // namespace
}  // namespace neqm
