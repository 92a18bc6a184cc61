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
#include <string>
#include <string_view>
#include <vector>

#include "neqm/dataset.hpp"
#include "neqm/network.hpp"
#include "neqm/stft.hpp"

namespace neqm {

inline constexpr std::size_t kInputFrames = 298;  // 3 s at a 10 ms hop
inline constexpr std::size_t kInputBins = 257;
inline constexpr int kModelVersion = 1;

struct TrainReport {
  std::vector<double> train_loss;  // full train-split MSE; index 0 is before training
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double test_mse = 0.0;

  friend bool operator==(const TrainReport&, const TrainReport&) = default;
};

// The learned quality loss: 0 = premium, 1 = cheap.
struct ScorerModel {
  Network layers;
  StftConfig stft_config;
  double normalizer_mean = 0.0;  // subtracted from every log-magnitude cell
  std::size_t input_frames = kInputFrames;
  std::size_t input_bins = kInputBins;
  TrainReport train_report;

  Shape3 input_shape() const { return {1, input_frames, input_bins}; }

  friend bool operator==(const ScorerModel&, const ScorerModel&) = default;
};

// conv3x3x8-relu-pool-drop, conv3x3x16-relu-pool-drop, conv3x3x32-relu,
// global average pool, dense 32->1, sigmoid. All parameters zero.
Network scorer_architecture(double dropout_rate = 0.3);
ScorerModel make_scorer(uint64_t init_seed, double dropout_rate = 0.3);

// (log_mag - normalizer_mean) as a 1 x frames x bins tensor.
Tensor scorer_input(const ScorerModel& model, const Grid& log_mag);

double score(const ScorerModel& model, const Spectrogram& spec);

struct ScoreGradient {
  double score = 0.0;
  Grid grad;  // d score / d log_mag
};

// Eval-mode score and its gradient with respect to the log-magnitude grid.
ScoreGradient score_with_gradient(const ScorerModel& model, const Grid& log_mag);

enum class Optimizer { kAdam, kSgd };

std::string_view optimizer_name(Optimizer o);
Optimizer parse_optimizer(std::string_view name);

struct TrainConfig {
  int epochs = 30;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  double dropout_rate = 0.0;
  Optimizer optimizer = Optimizer::kAdam;
  uint64_t seed = 7;

  void validate() const;
};

double label_target(ClassLabel label);

// Clip decoded, transformed and cropped/padded to the scorer input size.
struct LabeledSpectrogram {
  Grid log_mag;
  ClassLabel label = ClassLabel::kPremium;
  int group = -1;  // items sharing a non-negative group stay in one minibatch
};

// Epoch ordering: groups are shuffled as units and their members kept adjacent.
std::vector<std::size_t> grouped_order(const std::vector<LabeledSpectrogram>& items, uint64_t seed);

std::vector<LabeledSpectrogram> load_split(const DatasetManifest& manifest, Split split,
                                           const StftConfig& config = {});

using EpochCallback = std::function<void(int epoch, double train_loss)>;

ScorerModel train(const TrainConfig& config, const DatasetManifest& manifest,
                  const EpochCallback& on_epoch = {});
ScorerModel train(const TrainConfig& config, const std::vector<LabeledSpectrogram>& train_set,
                  const std::vector<LabeledSpectrogram>& test_set,
                  const EpochCallback& on_epoch = {});

struct EvalResult {
  double accuracy = 0.0;
  double mse = 0.0;
};

// A clip is predicted cheap iff score > 0.5 (strict).
EvalResult evaluate(const ScorerModel& model, const std::vector<LabeledSpectrogram>& clips);
EvalResult evaluate(const ScorerModel& model, const DatasetManifest& manifest, Split split);
EvalResult evaluate_scores(const std::vector<double>& scores, const std::vector<ClassLabel>& labels);

// JSON model file: magic "neqm", version 1.
void save_model(const ScorerModel& model, const std::filesystem::path& path);
ScorerModel load_model(const std::filesystem::path& path);
std::string model_to_json(const ScorerModel& model);
ScorerModel model_from_json(const std::string& text);

}  // namespace neqm
