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
// neqm: learned-loss adaptive EQ masking from the command line.

#include <iostream>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"
#include "json_config.hpp"

using namespace neqm::cli;

namespace {

// First positional token, which names the subcommand.
std::string subcommand_name(int argc, char** argv) {
  for (int i = 1; i < argc; ++i)
    if (argv[i][0] != '-') return argv[i];
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Learned-loss adaptive EQ: synthesize data, train a quality scorer, "
               "optimize per-clip spectral masks"};
  app.require_subcommand(1);
  // Subcommands pass --config up to the root app, which is the only level
  // CLI11 reads config files at. Top-level JSON keys apply to the subcommand.
  app.fallthrough();
  app.set_config("--config", "", "JSON file with option values; command-line flags win");
  auto formatter = std::make_shared<ConfigJson>();
  formatter->set_section(subcommand_name(argc, argv));
  app.config_formatter(formatter);

  SynthOptions synth;
  auto* s = app.add_subcommand("synth", "Render the two-class synthetic corpus and its manifest");
  s->add_option("--out", synth.out_dir, "Output directory")->required();
  s->add_option("--sequences", synth.sequences, "Number of note sequences (>= 20)")
      ->capture_default_str()->check(CLI::Range(20, 100000));
  s->add_option("--seed", synth.seed, "Dataset seed")->capture_default_str();
  s->add_option("--duration", synth.duration, "Clip duration in seconds [1, 30]")
      ->capture_default_str()->check(CLI::Range(1.0, 30.0));

  TrainOptions tr;
  auto* t = app.add_subcommand("train", "Train the quality scorer on a manifest");
  t->add_option("--manifest", tr.manifest, "Manifest CSV written by synth")->required();
  t->add_option("--model", tr.model, "Output model file (JSON)")->required();
  t->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str()->check(CLI::NonNegativeNumber);
  t->add_option("--batch-size", tr.batch_size, "Minibatch size")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--optimizer", tr.optimizer, "Optimizer")
      ->capture_default_str()->check(CLI::IsMember({"adam", "sgd"}));
  t->add_option("--lr", tr.lr, "Learning rate")->capture_default_str()->check(CLI::PositiveNumber);
  t->add_option("--dropout", tr.dropout, "Dropout rate [0, 1)")->capture_default_str()->check(CLI::Range(0.0, 0.999999));
  t->add_option("--seed", tr.seed, "Initialization and shuffling seed")->capture_default_str();
  t->add_flag("--quiet", tr.quiet, "Suppress per-epoch progress on stderr");

  TransformOptions tf;
  auto* f = app.add_subcommand("transform", "Optimize a mask for one clip and render the result");
  f->add_option("--model", tf.model, "Scorer model file")->required();
  f->add_option("--in", tf.in, "Input WAV (3 s, 16 kHz mono 16-bit)")->required();
  f->add_option("--out", tf.out, "Output WAV")->required();
  f->add_option("--alpha", tf.alpha, "Proximity weight on ||M||^2")->capture_default_str()->check(CLI::NonNegativeNumber);
  f->add_option("--beta", tf.beta, "Weight on the mask variance")->capture_default_str()->check(CLI::NonNegativeNumber);
  f->add_option("--lr", tf.lr, "Gradient step size")->capture_default_str()->check(CLI::PositiveNumber);
  f->add_option("--iters", tf.iters, "Iteration budget")->capture_default_str()->check(CLI::PositiveNumber);
  f->add_option("--target", tf.target, "Stop once the score drops below this")->capture_default_str()->check(CLI::Range(1e-12, 1.0 - 1e-12));
  f->add_option("--init", tf.init, "Mask initialization")->capture_default_str()->check(CLI::IsMember({"blocks", "gaussian", "zeros"}));
  f->add_option("--sigma", tf.sigma, "Std-dev for gaussian init")->capture_default_str()->check(CLI::NonNegativeNumber);
  f->add_option("--seed", tf.seed, "Initialization seed")->capture_default_str();
  f->add_option("--blocks", tf.blocks, "Number of init blocks")->capture_default_str()->check(CLI::NonNegativeNumber);
  f->add_option("--gain", tf.gain, "Block gains drawn from [-gain, gain]")->capture_default_str()->check(CLI::NonNegativeNumber);
  f->add_option("--kernel", tf.kernel, "Odd box-filter size for block smoothing")->capture_default_str()->check(CLI::PositiveNumber);
  f->add_option("--export-mask", tf.export_mask, "Prefix for mask CSV/PGM and trajectory CSV exports");

  ScoreOptions sc;
  auto* c = app.add_subcommand("score", "Score a 3 s clip (0 = premium, 1 = cheap)");
  c->add_option("--model", sc.model, "Scorer model file")->required();
  c->add_option("--in", sc.in, "Input WAV")->required();

  SaliencyOptions sa;
  auto* m = app.add_subcommand("saliency", "Write a saliency map for a clip");
  m->add_option("--model", sa.model, "Scorer model file")->required();
  m->add_option("--in", sa.in, "Input WAV")->required();
  m->add_option("--method", sa.method, "cam or gradient")->capture_default_str()->check(CLI::IsMember({"cam", "gradient"}));
  m->add_option("--out", sa.out, "Output prefix (<prefix>.csv, <prefix>_pos.pgm, <prefix>_neg.pgm)")->required();

  EvalOptions ev;
  auto* e = app.add_subcommand("eval", "DTW-align two clips and report spectral distances");
  e->add_option("--a", ev.a, "First WAV")->required();
  e->add_option("--b", ev.b, "Second WAV")->required();
  e->add_option("--path-csv", ev.path_csv, "Write the alignment path as i,j rows");

  AccuracyOptions ac;
  auto* a = app.add_subcommand("accuracy", "Evaluate a model on one split of a manifest");
  a->add_option("--model", ac.model, "Scorer model file")->required();
  a->add_option("--manifest", ac.manifest, "Manifest CSV")->required();
  a->add_option("--split", ac.split, "train or test")->capture_default_str()->check(CLI::IsMember({"train", "test"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
  if (s->parsed()) return run_synth(synth, out, err);
  if (t->parsed()) return run_train(tr, out, err);
  if (f->parsed()) return run_transform(tf, out, err);
  if (c->parsed()) return run_score(sc, out, err);
  if (m->parsed()) return run_saliency(sa, out, err);
  if (e->parsed()) return run_eval(ev, out, err);
  if (a->parsed()) return run_accuracy(ac, out, err);
  return kExitUsage;
}
