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
#include <functional>
#include <utility>
#include <variant>
#include <vector>

#include "neqm/scorer.hpp"
#include "neqm/stft.hpp"

namespace neqm {

// Mask initialization from random rectangles ("sticky notes") whose gains
// add where they overlap, followed by a k x k box blur.
struct BlockInitSpec {
  int n_blocks = 24;
  std::pair<std::size_t, std::size_t> width_range{20, 60};   // frames
  std::pair<std::size_t, std::size_t> height_range{16, 48};  // bins
  std::pair<double, double> gain_range{-0.5, 0.5};
  std::size_t smoothing_kernel = 9;  // odd
  uint64_t seed = 11;

  void validate() const;
};

struct GaussianInit {
  double sigma = 0.1;
  uint64_t seed = 11;
};

struct ZerosInit {};

using MaskInit = std::variant<BlockInitSpec, GaussianInit, ZerosInit>;

struct OptimConfig {
  double alpha = 3e-5;  // proximity weight on ||M||^2
  double beta = 1e-2;   // weight on Var(M)
  double learning_rate = 100.0;
  int max_iters = 2000;
  double target_score = 0.2;
  MaskInit init = BlockInitSpec{};
  int max_halvings = 20;

  void validate() const;
};

Mask init_mask_blocks(const BlockInitSpec& spec, std::size_t frames, std::size_t bins);
Mask init_mask_gaussian(const GaussianInit& spec, std::size_t frames, std::size_t bins);
Mask init_mask(const MaskInit& init, std::size_t frames, std::size_t bins);

// k x k box average; cells near the border are divided by the number of
// in-bounds taps rather than k*k.
Grid box_smooth(const Grid& grid, std::size_t k);

struct ObjectiveTerms {
  double value = 0.0;
  double score = 0.0;
  double proximity = 0.0;  // sum m^2, unweighted
  double variance = 0.0;   // Var(m), unweighted
};

struct ObjectiveEval {
  ObjectiveTerms terms;
  Mask grad;
};

// score(x + m) + alpha * ||m||^2 + beta * Var(m), with its gradient in m.
// The score sees x + m without the floor clamp of apply_mask.
ObjectiveEval objective(const ScorerModel& model, const Spectrogram& x, const Mask& m,
                        double alpha, double beta);

enum class StopReason { kTargetReached, kMaxIters, kStalled };
std::string_view stop_reason_name(StopReason reason);

struct TrajectoryPoint {
  double objective = 0.0;
  double score = 0.0;
  double proximity = 0.0;
  double variance = 0.0;
};

struct MaskOptResult {
  Mask mask;
  std::vector<TrajectoryPoint> trajectory;
  int iterations_run = 0;
  StopReason stopped_reason = StopReason::kMaxIters;

  friend bool operator==(const MaskOptResult& a, const MaskOptResult& b) {
    auto same = [](const TrajectoryPoint& p, const TrajectoryPoint& q) {
      return p.objective == q.objective && p.score == q.score && p.proximity == q.proximity &&
             p.variance == q.variance;
    };
    return a.mask == b.mask && a.iterations_run == b.iterations_run &&
           a.stopped_reason == b.stopped_reason &&
           std::equal(a.trajectory.begin(), a.trajectory.end(), b.trajectory.begin(),
                      b.trajectory.end(), same);
  }
};

using IterationCallback = std::function<void(int iter, const TrajectoryPoint&)>;

// Gradient descent from the configured initialization. Each entry of the
// trajectory describes the mask at the start of an iteration; a step that
// would raise the objective is retried with the step size halved (up to
// max_halvings times). If no halving helps, the run ends as kStalled.
MaskOptResult optimize_mask(const ScorerModel& model, const Spectrogram& x,
                            const OptimConfig& config, const IterationCallback& on_iter = {});

// Mean absolute difference over all horizontally and vertically adjacent pairs.
double mask_total_variation(const Mask& m);

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryPoint>& trajectory);

}  // namespace neqm
