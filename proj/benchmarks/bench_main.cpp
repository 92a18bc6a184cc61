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


#include <random>

#include "benchmark/benchmark.h"
#include "neqm/dtw.hpp"
#include "neqm/maskopt.hpp"
#include "neqm/scorer.hpp"
#include "neqm/stft.hpp"

namespace {

neqm::AudioBuffer noise_clip() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  neqm::AudioBuffer a;
  a.samples.resize(48000);
  for (double& v : a.samples) v = u(rng);
  return a;
}

void BM_Stft(benchmark::State& state) {
  const auto clip = noise_clip();
  for (auto _ : state) benchmark::DoNotOptimize(neqm::stft(clip));
}
BENCHMARK(BM_Stft)->Unit(benchmark::kMillisecond);

void BM_Istft(benchmark::State& state) {
  const auto spec = neqm::stft(noise_clip());
  for (auto _ : state) benchmark::DoNotOptimize(neqm::istft(spec));
}
BENCHMARK(BM_Istft)->Unit(benchmark::kMillisecond);

void BM_ScorerForward(benchmark::State& state) {
  auto model = neqm::make_scorer(1);
  const auto spec = neqm::stft(noise_clip());
  for (auto _ : state) benchmark::DoNotOptimize(neqm::score(model, spec));
}
BENCHMARK(BM_ScorerForward)->Unit(benchmark::kMillisecond);

void BM_ScorerGradient(benchmark::State& state) {
  auto model = neqm::make_scorer(1);
  const auto spec = neqm::stft(noise_clip());
  for (auto _ : state) benchmark::DoNotOptimize(neqm::score_with_gradient(model, spec.log_mag));
}
BENCHMARK(BM_ScorerGradient)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  auto model = neqm::make_scorer(1);
  const auto spec = neqm::stft(noise_clip());
  const auto input = neqm::scorer_input(model, spec.log_mag);
  for (auto _ : state) {
    const auto fwd = neqm::forward(model.layers, input, neqm::ForwardMode::training(3));
    const neqm::Tensor up(fwd.output.shape(), 1.0);
    benchmark::DoNotOptimize(neqm::backward(model.layers, fwd.cache, up));
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_Dtw(benchmark::State& state) {
  const auto a = neqm::stft(noise_clip());
  const auto b = neqm::stft(noise_clip());
  for (auto _ : state) benchmark::DoNotOptimize(neqm::dtw_align(a, b));
}
BENCHMARK(BM_Dtw)->Unit(benchmark::kMillisecond);

void BM_BoxSmooth(benchmark::State& state) {
  const neqm::Grid g(298, 257, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(neqm::box_smooth(g, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_BoxSmooth)->Arg(3)->Arg(9)->Arg(21);

}  // namespace
