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
#include <ostream>
#include <string>

#include "neqm/maskopt.hpp"
#include "neqm/scorer.hpp"

namespace neqm::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,
  kExitTraining = 3,
  kExitOptimization = 4,
};

struct SynthOptions {
  std::string out_dir;
  int sequences = 50;
  uint64_t seed = 1;
  double duration = 3.0;
};

struct TrainOptions {
  std::string manifest;
  std::string model;
  int epochs = TrainConfig{}.epochs;
  std::size_t batch_size = TrainConfig{}.batch_size;
  double lr = TrainConfig{}.learning_rate;
  double dropout = TrainConfig{}.dropout_rate;
  std::string optimizer{optimizer_name(TrainConfig{}.optimizer)};
  uint64_t seed = TrainConfig{}.seed;
  bool quiet = false;
};

struct TransformOptions {
  std::string model;
  std::string in;
  std::string out;
  double alpha = OptimConfig{}.alpha;
  double beta = OptimConfig{}.beta;
  double lr = OptimConfig{}.learning_rate;
  int iters = OptimConfig{}.max_iters;
  double target = OptimConfig{}.target_score;
  std::string init = "blocks";
  double sigma = GaussianInit{}.sigma;
  uint64_t seed = BlockInitSpec{}.seed;
  int blocks = BlockInitSpec{}.n_blocks;
  double gain = BlockInitSpec{}.gain_range.second;
  std::size_t kernel = BlockInitSpec{}.smoothing_kernel;
  std::string export_mask;
};

struct ScoreOptions {
  std::string model;
  std::string in;
};

struct SaliencyOptions {
  std::string model;
  std::string in;
  std::string method = "cam";
  std::string out;
};

struct EvalOptions {
  std::string a;
  std::string b;
  std::string path_csv;
};

struct AccuracyOptions {
  std::string model;
  std::string manifest;
  std::string split = "test";
};

// Each command writes key=value results to out and diagnostics to err, and
// returns a process exit code.
int run_synth(const SynthOptions& o, std::ostream& out, std::ostream& err);
int run_train(const TrainOptions& o, std::ostream& out, std::ostream& err);
int run_transform(const TransformOptions& o, std::ostream& out, std::ostream& err);
int run_score(const ScoreOptions& o, std::ostream& out, std::ostream& err);
int run_saliency(const SaliencyOptions& o, std::ostream& out, std::ostream& err);
int run_eval(const EvalOptions& o, std::ostream& out, std::ostream& err);
int run_accuracy(const AccuracyOptions& o, std::ostream& out, std::ostream& err);

}  // namespace neqm::cli
