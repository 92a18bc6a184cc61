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
#include "neqm/error.hpp"
#include "neqm/saliency.hpp"
#include "oracles.hpp"

namespace neqm {
namespace {

Spectrogram random_spec(uint64_t seed) {
  std::mt19937_64 rng(seed);
  Spectrogram s;
  s.log_mag = testing::random_grid(rng, kInputFrames, kInputBins, -8.0, 1.0);
  s.phase = Grid(kInputFrames, kInputBins);
  s.n_samples = 48000;
  return s;
}

TEST(UpsampleTest, CornersAndConstants) {
  std::mt19937_64 rng(1);
  const Grid g = testing::random_grid(rng, 4, 5, -1.0, 1.0);
  const Grid u = upsample_bilinear(g, 10, 13);
  EXPECT_EQ(u(0, 0), g(0, 0));
  EXPECT_NEAR(u(9, 12), g(3, 4), 1e-15);
  EXPECT_NEAR(u(0, 12), g(0, 4), 1e-15);
  EXPECT_NEAR(u(9, 0), g(3, 0), 1e-15);
  const Grid flat = upsample_bilinear(Grid(3, 3, 0.25), 7, 11);
  for (double v : flat.data()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(UpsampleTest, ReproducesAffineFunctions) {
  Grid g(5, 6);
  auto f = [](double y, double x) { return 0.5 + 2.0 * y - 0.75 * x; };
  for (std::size_t r = 0; r < 5; ++r)
    for (std::size_t c = 0; c < 6; ++c) g(r, c) = f(r, c);
  const Grid u = upsample_bilinear(g, 17, 23);
  for (std::size_t r = 0; r < 17; ++r)
    for (std::size_t c = 0; c < 23; ++c)
      EXPECT_NEAR(u(r, c), f(r * 4.0 / 16.0, c * 5.0 / 22.0), 1e-12);
}

TEST(UpsampleTest, RejectsEmpty) { EXPECT_THROW(upsample_bilinear(Grid(), 3, 3), Error); }

TEST(CamTest, PooledMeanPlusBiasIsTheLogit) {
  for (uint64_t seed : {1u, 2u, 3u}) {
    auto m = make_scorer(seed);
    m.normalizer_mean = -3.5;
    m.layers[11].biases[0] = 0.1 * static_cast<double>(seed);
    const auto s = random_spec(seed + 10);
    const Grid pooled = cam_pooled(m, s);
    double mean = 0.0;
    for (double v : pooled.data()) mean += v;
    mean /= static_cast<double>(pooled.size());
    const double logit = mean + m.layers[11].biases[0];
    EXPECT_NEAR(1.0 / (1.0 + std::exp(-logit)), score(m, s), 1e-12);
  }
}

TEST(CamTest, UpsampledToInputShape) {
  const auto m = make_scorer(4);
  const auto s = random_spec(5);
  const auto c = cam(m, s);
  EXPECT_EQ(c.method, SaliencyMethod::kCam);
  EXPECT_EQ(c.values.rows(), 298u);
  EXPECT_EQ(c.values.cols(), 257u);
  const Grid pooled = cam_pooled(m, s);
  EXPECT_EQ(c.values(0, 0), pooled(0, 0));
}

TEST(CamTest, FlippingTheHeadFlipsTheSign) {
  auto m = make_scorer(6);
  const auto s = random_spec(7);
  const Grid a = cam_pooled(m, s);
  for (double& w : m.layers[11].weights) w = -w;
  const Grid b = cam_pooled(m, s);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.data()[i], -b.data()[i]);
}

TEST(CamTest, NeedsAGapHead) {
  auto m = make_scorer(1);
  m.layers.pop_back();
  try {
    cam(m, random_spec(1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::kArchitectureMismatch);
  }
}

TEST(InputGradientSaliencyTest, IsAbsoluteGradient) {
  auto m = make_scorer(8);
  m.normalizer_mean = -3.0;
  const auto s = random_spec(9);
  const auto sal = input_gradient_saliency(m, s);
  const auto sg = score_with_gradient(m, s.log_mag);
  EXPECT_EQ(sal.method, SaliencyMethod::kInputGradient);
  for (std::size_t i = 0; i < sg.grad.size(); ++i) EXPECT_EQ(sal.values.data()[i], std::abs(sg.grad.data()[i]));
  EXPECT_EQ(saliency_method_name(SaliencyMethod::kCam), "cam");
}

}  // namespace
}  // namespace neqm
