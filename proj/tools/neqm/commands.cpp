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

#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>

#include "neqm/audio.hpp"
#include "neqm/dataset.hpp"
#include "neqm/dtw.hpp"
#include "neqm/error.hpp"
#include "neqm/export.hpp"
#include "neqm/maskopt.hpp"
#include "neqm/saliency.hpp"
#include "neqm/scorer.hpp"
#include "neqm/stft.hpp"

namespace neqm::cli {
namespace {

constexpr std::size_t kClipSamples = 3 * kSampleRate;

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Reads a clip and returns exactly three seconds of it.
AudioBuffer load_clip(const std::string& path, std::ostream& err) {
  AudioBuffer audio = read_wav(path);
  if (audio.samples.size() < kClipSamples)
    throw Error(Errc::kTooShort, path + " holds " + num(audio.duration_seconds()) +
                                     " s of audio; 3 s are required");
  if (audio.samples.size() > kClipSamples) {
    err << "warning: " << path << " is longer than 3 s; using the first 3 s\n";
    audio.samples.resize(kClipSamples);
  }
  return audio;
}

Spectrogram clip_spectrogram(const ScorerModel& model, const std::string& path, std::ostream& err) {
  return stft(load_clip(path, err), model.stft_config);
}

int fail(std::ostream& err, const Error& e, int code = kExitUsage) {
  err << "error: " << e.what() << "\n";
  return code;
}

}  // namespace

int run_synth(const SynthOptions& o, std::ostream& out, std::ostream& err) {
  try {
    DatasetConfig config;
    config.seed = o.seed;
    config.n_sequences = o.sequences;
    config.clip_duration_s = o.duration;
    config.out_dir = o.out_dir;
    const auto manifest = build_dataset(config);
    const auto premium = manifest.count(Split::kTrain, ClassLabel::kPremium) +
                         manifest.count(Split::kTest, ClassLabel::kPremium);
    const auto cheap = manifest.count(Split::kTrain, ClassLabel::kCheap) +
                       manifest.count(Split::kTest, ClassLabel::kCheap);
    out << "manifest=" << (config.out_dir / kManifestFileName).string() << "\n";
    out << "clips=" << manifest.entries.size() << "\n";
    out << "premium=" << premium << "\n";
    out << "cheap=" << cheap << "\n";
    out << "train=" << manifest.select(Split::kTrain).size() << "\n";
    out << "test=" << manifest.select(Split::kTest).size() << "\n";
    out << "summary=" << manifest.entries.size() << " clips (" << premium << " premium / " << cheap
        << " cheap)\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int run_train(const TrainOptions& o, std::ostream& out, std::ostream& err) {
  TrainConfig config;
  config.epochs = o.epochs;
  config.batch_size = o.batch_size;
  config.learning_rate = o.lr;
  config.dropout_rate = o.dropout;
  config.seed = o.seed;
  try {
    config.optimizer = parse_optimizer(o.optimizer);
    config.validate();
    const auto manifest = read_manifest(o.manifest);
    if (!o.quiet) err << "loading " << manifest.entries.size() << " clips\n";
    const auto train_set = load_split(manifest, Split::kTrain);
    const auto test_set = load_split(manifest, Split::kTest);
    auto progress = [&](int epoch, double loss) {
      if (!o.quiet) err << "epoch " << epoch << "/" << config.epochs << " train_loss=" << num(loss) << "\n";
    };
    const ScorerModel model = train(config, train_set, test_set, progress);
    save_model(model, o.model);
    out << "model=" << o.model << "\n";
    out << "train_loss=" << num(model.train_report.train_loss.back()) << "\n";
    out << "train_accuracy=" << num(model.train_report.train_accuracy) << "\n";
    out << "test_mse=" << num(model.train_report.test_mse) << "\n";
    out << "test_accuracy=" << num(model.train_report.test_accuracy) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e, e.code() == Errc::kNonFiniteLoss ? kExitTraining : kExitUsage);
  }
}

int run_transform(const TransformOptions& o, std::ostream& out, std::ostream& err) {
  OptimConfig config;
  config.alpha = o.alpha;
  config.beta = o.beta;
  config.learning_rate = o.lr;
  config.max_iters = o.iters;
  config.target_score = o.target;
  if (o.init == "blocks") {
    BlockInitSpec blocks;
    blocks.n_blocks = o.blocks;
    blocks.gain_range = {-o.gain, o.gain};
    blocks.smoothing_kernel = o.kernel;
    blocks.seed = o.seed;
    config.init = blocks;
  } else if (o.init == "gaussian") {
    config.init = GaussianInit{o.sigma, o.seed};
  } else if (o.init == "zeros") {
    config.init = ZerosInit{};
  } else {
    err << "error: --init must be blocks, gaussian or zeros\n";
    return kExitUsage;
  }
  try {
    config.validate();
    if (o.init == "gaussian" && o.alpha == 0.0 && o.beta == 0.0)
      err << "warning: unconstrained optimization may produce noisy masks\n";

    const ScorerModel model = load_model(o.model);
    const Spectrogram x = clip_spectrogram(model, o.in, err);
    const double initial = score(model, x);
    const MaskOptResult result = optimize_mask(model, x, config);
    const Spectrogram y = apply_mask(x, result.mask);
    const double final_score = score(model, y);
    AudioBuffer rendered = istft(y);
    write_wav(o.out, rendered);
    const double output_score = score(model, stft(read_wav(o.out), model.stft_config));

    if (!o.export_mask.empty()) {
      write_grid_csv(o.export_mask + "_mask.csv", result.mask.values);
      write_signed_pgm_pair(o.export_mask + "_mask", result.mask.values);
      write_trajectory_csv(o.export_mask + "_trajectory.csv", result.trajectory);
    }
    out << "initial_score=" << num(initial) << "\n";
    out << "final_score=" << num(final_score) << "\n";
    out << "output_score=" << num(output_score) << "\n";
    out << "iterations=" << result.iterations_run << "\n";
    out << "stopped=" << stop_reason_name(result.stopped_reason) << "\n";
    out << "mask_tv=" << num(mask_total_variation(result.mask)) << "\n";
    out << "output=" << o.out << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e, e.code() == Errc::kNonFiniteObjective ? kExitOptimization : kExitUsage);
  }
}

int run_score(const ScoreOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const ScorerModel model = load_model(o.model);
    const double s = score(model, clip_spectrogram(model, o.in, err));
    out << "score=" << num(s) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int run_saliency(const SaliencyOptions& o, std::ostream& out, std::ostream& err) {
  if (o.method != "cam" && o.method != "gradient") {
    err << "error: --method must be cam or gradient\n";
    return kExitUsage;
  }
  try {
    const ScorerModel model = load_model(o.model);
    const Spectrogram x = clip_spectrogram(model, o.in, err);
    const SaliencyMap map =
        o.method == "cam" ? cam(model, x) : input_gradient_saliency(model, x);
    write_grid_csv(o.out + ".csv", map.values);
    write_signed_pgm_pair(o.out, map.values);
    double peak = 0.0;
    for (double v : map.values.data()) peak = std::max(peak, std::abs(v));
    out << "method=" << saliency_method_name(map.method) << "\n";
    out << "csv=" << o.out << ".csv\n";
    out << "pgm_pos=" << o.out << "_pos.pgm\n";
    out << "pgm_neg=" << o.out << "_neg.pgm\n";
    out << "max_abs=" << num(peak) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int run_eval(const EvalOptions& o, std::ostream& out, std::ostream& err) {
  try {
    const Spectrogram a = stft(read_wav(o.a));
    const Spectrogram b = stft(read_wav(o.b));
    const DtwPath path = dtw_align(a, b);
    const AlignedDistance d = aligned_distance(a, b, path);
    if (!o.path_csv.empty()) write_path_csv(o.path_csv, path);
    out << "dtw_cost=" << num(path.cost) << "\n";
    out << "path_length=" << path.steps.size() << "\n";
    out << "mean_frame_dist=" << num(d.mean_frame_dist) << "\n";
    out << "log_spectral_dist=" << num(d.log_spectral_dist) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

int run_accuracy(const AccuracyOptions& o, std::ostream& out, std::ostream& err) {
  if (o.split != "train" && o.split != "test") {
    err << "error: --split must be train or test\n";
    return kExitUsage;
  }
  try {
    const ScorerModel model = load_model(o.model);
    const auto manifest = read_manifest(o.manifest);
    const auto r = evaluate(model, manifest, o.split == "train" ? Split::kTrain : Split::kTest);
    out << "accuracy=" << num(r.accuracy) << "\n";
    out << "mse=" << num(r.mse) << "\n";
    return kExitOk;
  } catch (const Error& e) {
    return fail(err, e);
  }
}

}  // namespace neqm::cli
