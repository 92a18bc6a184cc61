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

#include "neqm/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "neqm/error.hpp"

namespace neqm {
namespace {

using json = nlohmann::json;

uint64_t sample_seed(uint64_t seed, int epoch, std::size_t position) {
  uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<uint64_t>(epoch) * 1000003ULL + position + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void check_input(const ScorerModel& model, const Grid& log_mag) {
  if (log_mag.rows() != model.input_frames || log_mag.cols() != model.input_bins)
    throw Error(Errc::kShapeMismatch,
                "scorer expects " + std::to_string(model.input_frames) + "x" +
                    std::to_string(model.input_bins) + " log-magnitude grid, got " +
                    std::to_string(log_mag.rows()) + "x" + std::to_string(log_mag.cols()) +
                    " (clips must be exactly 3 s)");
}

double mean_loss(const ScorerModel& model, const std::vector<LabeledSpectrogram>& set) {
  double sum = 0.0;
  for (const auto& item : set) {
    const double s = predict(model.layers, scorer_input(model, item.log_mag))[0];
    const double d = s - label_target(item.label);
    sum += d * d;
  }
  return sum / static_cast<double>(set.size());
}

void require_both_classes(const std::vector<LabeledSpectrogram>& set, const char* name) {
  const bool premium = std::any_of(set.begin(), set.end(), [](const auto& s) {
    return s.label == ClassLabel::kPremium;
  });
  const bool cheap = std::any_of(set.begin(), set.end(), [](const auto& s) {
    return s.label == ClassLabel::kCheap;
  });
  if (!premium || !cheap)
    throw Error(Errc::kEmptySplit, std::string(name) + " split lacks one of the two classes");
}

}  // namespace

Network scorer_architecture(double dropout_rate) {
  return {
      Layer::conv2d(1, 8),  Layer::relu(), Layer::maxpool2x2(), Layer::dropout(dropout_rate),
      Layer::conv2d(8, 16), Layer::relu(), Layer::maxpool2x2(), Layer::dropout(dropout_rate),
      Layer::conv2d(16, 32), Layer::relu(), Layer::global_avg_pool(),
      Layer::dense(32, 1),  Layer::sigmoid(),
  };
}

ScorerModel make_scorer(uint64_t init_seed, double dropout_rate) {
  ScorerModel m;
  m.layers = scorer_architecture(dropout_rate);
  init_network(m.layers, init_seed);
  return m;
}

Tensor scorer_input(const ScorerModel& model, const Grid& log_mag) {
  check_input(model, log_mag);
  Tensor t(model.input_shape());
  const auto& src = log_mag.data();
  for (std::size_t i = 0; i < src.size(); ++i) t[i] = src[i] - model.normalizer_mean;
  return t;
}

double score(const ScorerModel& model, const Spectrogram& spec) {
  return predict(model.layers, scorer_input(model, spec.log_mag))[0];
}

ScoreGradient score_with_gradient(const ScorerModel& model, const Grid& log_mag) {
  auto fwd = forward(model.layers, scorer_input(model, log_mag), ForwardMode::eval());
  Tensor upstream(fwd.output.shape(), 1.0);
  auto bwd = backward(model.layers, fwd.cache, upstream, false);
  ScoreGradient out{fwd.output[0], Grid(log_mag.rows(), log_mag.cols())};
  out.grad.data() = std::move(bwd.input_grad.data());
  return out;
}

void TrainConfig::validate() const {
  if (epochs < 0) throw Error(Errc::kInvalidArgument, "epochs must be >= 0");
  if (batch_size == 0) throw Error(Errc::kInvalidArgument, "batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw Error(Errc::kInvalidArgument, "learning_rate must be > 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw Error(Errc::kInvalidArgument, "dropout_rate must lie in [0, 1)");
}

std::string_view optimizer_name(Optimizer o) { return o == Optimizer::kAdam ? "adam" : "sgd"; }

Optimizer parse_optimizer(std::string_view name) {
  if (name == "adam") return Optimizer::kAdam;
  if (name == "sgd") return Optimizer::kSgd;
  throw Error(Errc::kInvalidArgument, "unknown optimizer '" + std::string(name) + "'");
}

std::vector<std::size_t> grouped_order(const std::vector<LabeledSpectrogram>& items, uint64_t seed) {
  std::vector<std::vector<std::size_t>> units;
  std::vector<std::pair<int, std::size_t>> group_unit;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const int g = items[i].group;
    auto it = std::find_if(group_unit.begin(), group_unit.end(), [g](const auto& e) { return e.first == g; });
    if (g < 0 || it == group_unit.end()) {
      if (g >= 0) group_unit.emplace_back(g, units.size());
      units.push_back({i});
    } else {
      units[it->second].push_back(i);
    }
  }
  std::mt19937_64 rng(seed);
  std::shuffle(units.begin(), units.end(), rng);
  std::vector<std::size_t> order;
  order.reserve(items.size());
  for (const auto& u : units) order.insert(order.end(), u.begin(), u.end());
  return order;
}

double label_target(ClassLabel label) { return label == ClassLabel::kCheap ? 1.0 : 0.0; }

std::vector<LabeledSpectrogram> load_split(const DatasetManifest& manifest, Split split,
                                           const StftConfig& config) {
  std::vector<LabeledSpectrogram> out;
  for (const auto& e : manifest.entries) {
    if (e.split != split) continue;
    const auto spec = fit_frames(stft(read_wav(manifest.resolve(e)), config), kInputFrames);
    out.push_back({spec.log_mag, e.label, e.sequence_id});
  }
  return out;
}

ScorerModel train(const TrainConfig& config, const DatasetManifest& manifest,
                  const EpochCallback& on_epoch) {
  const auto train_set = load_split(manifest, Split::kTrain);
  const auto test_set = load_split(manifest, Split::kTest);
  return train(config, train_set, test_set, on_epoch);
}

ScorerModel train(const TrainConfig& config, const std::vector<LabeledSpectrogram>& train_set,
                  const std::vector<LabeledSpectrogram>& test_set, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw Error(Errc::kEmptySplit, "train split is empty");
  if (test_set.empty()) throw Error(Errc::kEmptySplit, "test split is empty");
  require_both_classes(train_set, "train");
  require_both_classes(test_set, "test");

  ScorerModel model = make_scorer(config.seed, config.dropout_rate);
  double total = 0.0;
  std::size_t cells = 0;
  for (const auto& item : train_set) {
    check_input(model, item.log_mag);
    for (double v : item.log_mag.data()) total += v;
    cells += item.log_mag.size();
  }
  model.normalizer_mean = total / static_cast<double>(cells);

  auto& report = model.train_report;
  report.train_loss.push_back(mean_loss(model, train_set));

  AdamState adam = AdamState::for_network(model.layers);
  std::size_t batch_index = 0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto order = grouped_order(train_set, sample_seed(config.seed, epoch, 0));

    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      Gradients grads = Gradients::zeros_like(model.layers);
      for (std::size_t p = start; p < end; ++p) {
        const auto& item = train_set[order[p]];
        auto fwd = forward(model.layers, scorer_input(model, item.log_mag),
                           ForwardMode::training(sample_seed(config.seed, epoch, p + 1)));
        const double s = fwd.output[0];
        const double diff = s - label_target(item.label);
        if (!std::isfinite(diff))
          throw Error(Errc::kNonFiniteLoss, "non-finite loss in batch " + std::to_string(batch_index));
        Tensor upstream(fwd.output.shape(), 2.0 * diff * inv_batch);
        grads.accumulate(backward(model.layers, fwd.cache, upstream).params);
      }
      if (config.optimizer == Optimizer::kAdam)
        adam_step(model.layers, grads, adam, config.learning_rate);
      else
        sgd_step(model.layers, grads, config.learning_rate);
    }

    const double loss = mean_loss(model, train_set);
    if (!std::isfinite(loss))
      throw Error(Errc::kNonFiniteLoss, "non-finite train loss after batch " + std::to_string(batch_index - 1));
    report.train_loss.push_back(loss);
    if (on_epoch) on_epoch(epoch, loss);
  }

  report.train_accuracy = evaluate(model, train_set).accuracy;
  const auto test = evaluate(model, test_set);
  report.test_accuracy = test.accuracy;
  report.test_mse = test.mse;
  return model;
}

EvalResult evaluate_scores(const std::vector<double>& scores, const std::vector<ClassLabel>& labels) {
  if (scores.empty()) throw Error(Errc::kEmptySplit, "nothing to evaluate");
  if (scores.size() != labels.size())
    throw Error(Errc::kShapeMismatch, "scores and labels differ in length");
  std::size_t correct = 0;
  double sq = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted_cheap = scores[i] > 0.5;
    if (predicted_cheap == (labels[i] == ClassLabel::kCheap)) ++correct;
    const double d = scores[i] - label_target(labels[i]);
    sq += d * d;
  }
  const auto n = static_cast<double>(scores.size());
  return {static_cast<double>(correct) / n, sq / n};
}

EvalResult evaluate(const ScorerModel& model, const std::vector<LabeledSpectrogram>& clips) {
  std::vector<double> scores;
  std::vector<ClassLabel> labels;
  for (const auto& c : clips) {
    scores.push_back(predict(model.layers, scorer_input(model, c.log_mag))[0]);
    labels.push_back(c.label);
  }
  return evaluate_scores(scores, labels);
}

EvalResult evaluate(const ScorerModel& model, const DatasetManifest& manifest, Split split) {
  return evaluate(model, load_split(manifest, split, model.stft_config));
}

std::string model_to_json(const ScorerModel& model) {
  json layers = json::array();
  for (const auto& l : model.layers) {
    json j;
    j["kind"] = std::string(layer_kind_name(l.kind));
    if (l.kind == LayerKind::kConv2d)
      j["shape"] = {l.out_channels, l.in_channels, 3, 3};
    else if (l.kind == LayerKind::kDense)
      j["shape"] = {l.out_channels, l.in_channels};
    else
      j["shape"] = json::array();
    j["weights"] = l.weights;
    j["biases"] = l.biases;
    if (l.kind == LayerKind::kDropout) j["rate"] = l.rate;
    layers.push_back(std::move(j));
  }
  json doc;
  doc["magic"] = "neqm";
  doc["version"] = kModelVersion;
  doc["stft_config"] = {{"fft_size", model.stft_config.fft_size},
                        {"window_len", model.stft_config.window_len},
                        {"hop", model.stft_config.hop},
                        {"log_epsilon", model.stft_config.log_epsilon}};
  doc["normalizer_mean"] = model.normalizer_mean;
  doc["input_frames"] = model.input_frames;
  doc["input_bins"] = model.input_bins;
  doc["layers"] = std::move(layers);
  doc["train_report"] = {{"train_loss", model.train_report.train_loss},
                         {"train_accuracy", model.train_report.train_accuracy},
                         {"test_accuracy", model.train_report.test_accuracy},
                         {"test_mse", model.train_report.test_mse}};
  return doc.dump(1);
}

ScorerModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::kCorruptPayload, std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("magic") || doc["magic"] != "neqm")
    throw Error(Errc::kBadMagic, "model file does not start with magic \"neqm\"");
  if (!doc.contains("version") || !doc["version"].is_number_integer())
    throw Error(Errc::kCorruptPayload, "model file has no integer version");
  if (doc["version"].get<int>() != kModelVersion)
    throw Error(Errc::kVersionUnsupported,
                "model version " + doc["version"].dump() + " (supported: 1)");

  ScorerModel m;
  try {
    const auto& sc = doc.at("stft_config");
    m.stft_config.fft_size = sc.at("fft_size").get<std::size_t>();
    m.stft_config.window_len = sc.at("window_len").get<std::size_t>();
    m.stft_config.hop = sc.at("hop").get<std::size_t>();
    m.stft_config.log_epsilon = sc.at("log_epsilon").get<double>();
    m.normalizer_mean = doc.at("normalizer_mean").get<double>();
    m.input_frames = doc.at("input_frames").get<std::size_t>();
    m.input_bins = doc.at("input_bins").get<std::size_t>();
    for (const auto& j : doc.at("layers")) {
      const auto kind = parse_layer_kind(j.at("kind").get<std::string>());
      if (!kind) throw Error(Errc::kCorruptPayload, "unknown layer kind " + j.at("kind").dump());
      Layer l = Layer::of_kind(*kind);
      const auto shape = j.at("shape").get<std::vector<std::size_t>>();
      if (l.kind == LayerKind::kConv2d || l.kind == LayerKind::kDense) {
        if (shape.size() < 2) throw Error(Errc::kCorruptPayload, "parameter layer without shape");
        l.out_channels = shape[0];
        l.in_channels = shape[1];
      }
      l.weights = j.at("weights").get<std::vector<double>>();
      l.biases = j.at("biases").get<std::vector<double>>();
      if (l.kind == LayerKind::kDropout) l.rate = j.at("rate").get<double>();
      m.layers.push_back(std::move(l));
    }
    const auto& r = doc.at("train_report");
    m.train_report.train_loss = r.at("train_loss").get<std::vector<double>>();
    m.train_report.train_accuracy = r.at("train_accuracy").get<double>();
    m.train_report.test_accuracy = r.at("test_accuracy").get<double>();
    m.train_report.test_mse = r.at("test_mse").get<double>();
    m.stft_config.validate();
    validate_network(m.layers, m.input_shape());
  } catch (const json::exception& e) {
    throw Error(Errc::kCorruptPayload, std::string("malformed model file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::kCorruptPayload) throw;
    throw Error(Errc::kCorruptPayload, e.what());
  }
  return m;
}

void save_model(const ScorerModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << model_to_json(model) << '\n';
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

ScorerModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::kIoError, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace neqm
