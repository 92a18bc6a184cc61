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


#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "commands.hpp"
#include "gtest/gtest.h"
#include "neqm/audio.hpp"
#include "neqm/dataset.hpp"
#include "neqm/export.hpp"
#include "neqm/scorer.hpp"
#include "oracles.hpp"

namespace neqm {
namespace {

using KeyValues = std::map<std::string, std::string>;

KeyValues parse(const std::string& text) {
  KeyValues kv;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

// Runs the installed binary through the shell and returns its exit status.
int run_binary(const std::string& args, const std::filesystem::path& log) {
  const std::string cmd = std::string("\"") + NEQM_CLI_PATH + "\" " + args + " > \"" + log.string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// A small corpus and a one-epoch model shared by the in-process tests.
class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new std::filesystem::path(testing::scratch_dir("cli"));
    cli::SynthOptions s;
    s.out_dir = (*dir_ / "corpus").string();
    s.sequences = 20;
    std::ostringstream out, err;
    ASSERT_EQ(cli::run_synth(s, out, err), cli::kExitOk) << err.str();
    synth_out_ = new std::string(out.str());

    cli::TrainOptions t;
    t.manifest = (*dir_ / "corpus" / kManifestFileName).string();
    t.model = (*dir_ / "model.json").string();
    t.epochs = 1;
    t.quiet = true;
    std::ostringstream tout, terr;
    ASSERT_EQ(cli::run_train(t, tout, terr), cli::kExitOk) << terr.str();
    train_out_ = new std::string(tout.str());
  }
  static void TearDownTestSuite() {
    delete dir_;
    delete synth_out_;
    delete train_out_;
  }

  static std::string clip(const char* label, int seq) {
    const auto m = read_manifest(*dir_ / "corpus" / kManifestFileName);
    for (const auto& e : m.entries)
      if (e.sequence_id == seq && std::string(label_name(e.label)) == label) return m.resolve(e).string();
    return {};
  }

  static std::filesystem::path* dir_;
  static std::string* synth_out_;
  static std::string* train_out_;
};
std::filesystem::path* CliTest::dir_ = nullptr;
std::string* CliTest::synth_out_ = nullptr;
std::string* CliTest::train_out_ = nullptr;

TEST_F(CliTest, SynthReportsCounts) {
  const auto kv = parse(*synth_out_);
  EXPECT_EQ(kv.at("clips"), "40");
  EXPECT_EQ(kv.at("premium"), "20");
  EXPECT_EQ(kv.at("cheap"), "20");
  EXPECT_EQ(kv.at("train"), "32");
  EXPECT_EQ(kv.at("test"), "8");
  EXPECT_EQ(kv.at("summary"), "40 clips (20 premium / 20 cheap)");
}

TEST_F(CliTest, TrainWritesALoadableModel) {
  const auto kv = parse(*train_out_);
  const auto model = load_model(kv.at("model"));
  EXPECT_EQ(std::stod(kv.at("test_accuracy")), model.train_report.test_accuracy);
  EXPECT_EQ(model.train_report.train_loss.size(), 2u);
}

TEST_F(CliTest, ScoreMatchesTheLibrary) {
  cli::ScoreOptions o{(*dir_ / "model.json").string(), clip("premium", 4)};
  std::ostringstream out, err;
  ASSERT_EQ(cli::run_score(o, out, err), cli::kExitOk) << err.str();
  const auto model = load_model(o.model);
  const double want = score(model, stft(read_wav(o.in), model.stft_config));
  EXPECT_EQ(std::stod(parse(out.str()).at("score")), want);
}

TEST_F(CliTest, TransformIsDeterministicAndExports) {
  cli::TransformOptions o;
  o.model = (*dir_ / "model.json").string();
  o.in = clip("cheap", 4);
  o.iters = 3;
  o.export_mask = (*dir_ / "t").string();
  std::string outs[2];
  for (int r = 0; r < 2; ++r) {
    o.out = (*dir_ / ("t" + std::to_string(r) + ".wav")).string();
    std::ostringstream out, err;
    ASSERT_EQ(cli::run_transform(o, out, err), cli::kExitOk) << err.str();
    auto kv = parse(out.str());
    kv.erase("output");
    for (const auto& [k, v] : kv) outs[r] += k + "=" + v + "\n";
  }
  EXPECT_EQ(outs[0], outs[1]);
  EXPECT_EQ(testing::slurp(*dir_ / "t0.wav"), testing::slurp(*dir_ / "t1.wav"));
  const Grid mask = read_grid_csv(*dir_ / "t_mask.csv");
  EXPECT_EQ(mask.rows(), 298u);
  EXPECT_EQ(mask.cols(), 257u);
  EXPECT_TRUE(std::filesystem::exists(*dir_ / "t_mask_pos.pgm"));
  EXPECT_TRUE(std::filesystem::exists(*dir_ / "t_mask_neg.pgm"));
  EXPECT_EQ(testing::slurp(*dir_ / "t_trajectory.csv").substr(0, 39), "iter,objective,score,proximity,variance");
}

TEST_F(CliTest, TransformRejectsBadInit) {
  cli::TransformOptions o;
  o.model = (*dir_ / "model.json").string();
  o.in = clip("cheap", 4);
  o.out = (*dir_ / "x.wav").string();
  o.init = "uniform";
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_transform(o, out, err), cli::kExitUsage);
}

TEST_F(CliTest, TransformWarnsWhenUnconstrained) {
  cli::TransformOptions o;
  o.model = (*dir_ / "model.json").string();
  o.in = clip("cheap", 9);
  o.out = (*dir_ / "g.wav").string();
  o.init = "gaussian";
  o.alpha = o.beta = 0.0;
  o.iters = 1;
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_transform(o, out, err), cli::kExitOk);
  EXPECT_NE(err.str().find("noisy masks"), std::string::npos);
}

TEST_F(CliTest, SaliencyWritesMaps) {
  for (const char* method : {"cam", "gradient"}) {
    cli::SaliencyOptions o{(*dir_ / "model.json").string(), clip("premium", 9), method,
                           (*dir_ / (std::string("sal_") + method)).string()};
    std::ostringstream out, err;
    ASSERT_EQ(cli::run_saliency(o, out, err), cli::kExitOk) << err.str();
    const Grid g = read_grid_csv(o.out + ".csv");
    EXPECT_EQ(g.rows(), 298u);
    EXPECT_TRUE(std::filesystem::exists(o.out + "_pos.pgm"));
  }
  cli::SaliencyOptions bad{(*dir_ / "model.json").string(), clip("premium", 9), "lime", "x"};
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_saliency(bad, out, err), cli::kExitUsage);
}

TEST_F(CliTest, EvalOfAClipWithItselfIsZero) {
  const std::string a = clip("premium", 9);
  cli::EvalOptions o{a, a, (*dir_ / "path.csv").string()};
  std::ostringstream out, err;
  ASSERT_EQ(cli::run_eval(o, out, err), cli::kExitOk) << err.str();
  const auto kv = parse(out.str());
  EXPECT_EQ(std::stod(kv.at("dtw_cost")), 0.0);
  EXPECT_EQ(kv.at("path_length"), "298");
  EXPECT_EQ(std::stod(kv.at("log_spectral_dist")), 0.0);
  EXPECT_EQ(testing::slurp(*dir_ / "path.csv").substr(0, 12), "i,j\n0,0\n1,1\n");
}

TEST_F(CliTest, AccuracyMatchesTheTrainReport) {
  cli::AccuracyOptions o{(*dir_ / "model.json").string(),
                         (*dir_ / "corpus" / kManifestFileName).string(), "test"};
  std::ostringstream out, err;
  ASSERT_EQ(cli::run_accuracy(o, out, err), cli::kExitOk) << err.str();
  const auto model = load_model(o.model);
  EXPECT_EQ(std::stod(parse(out.str()).at("accuracy")), model.train_report.test_accuracy);
}

TEST_F(CliTest, MissingFilesAreUsageErrors) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_score({(*dir_ / "absent.json").string(), clip("premium", 4)}, out, err), cli::kExitUsage);
  EXPECT_NE(err.str().find("error:"), std::string::npos);
  cli::TrainOptions t;
  t.manifest = (*dir_ / "absent.csv").string();
  t.model = (*dir_ / "m.json").string();
  EXPECT_EQ(cli::run_train(t, out, err), cli::kExitUsage);
}

TEST_F(CliTest, ShortClipIsRejected) {
  AudioBuffer a;
  a.samples.assign(16000, 0.0);
  const auto p = *dir_ / "short.wav";
  write_wav(p, a);
  std::ostringstream out, err;
  EXPECT_EQ(cli::run_score({(*dir_ / "model.json").string(), p.string()}, out, err), cli::kExitUsage);
  EXPECT_NE(err.str().find("3 s are required"), std::string::npos);
}

TEST_F(CliTest, BinaryExitCodes) {
  const auto log = *dir_ / "bin.log";
  EXPECT_EQ(run_binary("", log), 2);
  EXPECT_EQ(run_binary("frobnicate", log), 2);
  EXPECT_EQ(run_binary("score --in x.wav", log), 2);
  EXPECT_EQ(run_binary("transform --model m --in i --out o --init uniform", log), 2);
  EXPECT_EQ(run_binary("synth --out " + (*dir_ / "tiny").string() + " --sequences 5", log), 2);
  EXPECT_EQ(run_binary("--help", log), 0);
  EXPECT_NE(testing::slurp(log).find("transform"), std::string::npos);
}

TEST_F(CliTest, BinaryReadsJsonConfig) {
  const auto cfg = *dir_ / "score.json";
  std::ofstream(cfg) << "{\"model\": \"" << (*dir_ / "model.json").string() << "\", \"in\": \""
                     << clip("premium", 4) << "\"}";
  const auto log = *dir_ / "cfg.log";
  ASSERT_EQ(run_binary("score --config " + cfg.string(), log), 0) << testing::slurp(log);
  EXPECT_NE(testing::slurp(log).find("score="), std::string::npos);
  std::ofstream(cfg) << "[1, 2";
  EXPECT_EQ(run_binary("score --config " + cfg.string(), log), 2);
}

}  // namespace
}  // namespace neqm
