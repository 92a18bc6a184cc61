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

#include "neqm/maskopt.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <string>

#include "neqm/error.hpp"

namespace neqm {
namespace {

// Moving average along one axis of a strided line; each output is divided
// by the number of in-bounds taps.
void box_line(const double* src, double* dst, std::size_t n, std::size_t stride, std::size_t half) {
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + src[i * stride];
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n, i + half + 1);
    dst[i * stride] = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
  }
}

void check_shape(const Spectrogram& x, const Mask& m) {
  if (!x.log_mag.same_shape(m.values))
    throw Error(Errc::kShapeMismatch,
                "mask " + std::to_string(m.values.rows()) + "x" + std::to_string(m.values.cols()) +
                    " vs spectrogram " + std::to_string(x.frames()) + "x" + std::to_string(x.bins()));
}

}  // namespace

void BlockInitSpec::validate() const {
  if (n_blocks < 0) throw Error(Errc::kInvalidArgument, "n_blocks must be >= 0");
  if (width_range.first == 0 || width_range.first > width_range.second)
    throw Error(Errc::kInvalidArgument, "width_range must be non-empty and positive");
  if (height_range.first == 0 || height_range.first > height_range.second)
    throw Error(Errc::kInvalidArgument, "height_range must be non-empty and positive");
  if (!(gain_range.first <= gain_range.second) || !std::isfinite(gain_range.first) ||
      !std::isfinite(gain_range.second))
    throw Error(Errc::kInvalidArgument, "gain_range must be finite and ordered");
  if (smoothing_kernel == 0 || smoothing_kernel % 2 == 0)
    throw Error(Errc::kInvalidArgument, "smoothing_kernel must be odd and >= 1");
}

void OptimConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error(Errc::kInvalidArgument, "alpha must be >= 0");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(Errc::kInvalidArgument, "beta must be >= 0");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate))
    throw Error(Errc::kInvalidArgument, "learning_rate must be > 0");
  if (max_iters < 1) throw Error(Errc::kInvalidArgument, "max_iters must be >= 1");
  if (!(target_score > 0.0 && target_score < 1.0))
    throw Error(Errc::kInvalidArgument, "target_score must lie in (0, 1)");
  if (max_halvings < 0) throw Error(Errc::kInvalidArgument, "max_halvings must be >= 0");
  if (const auto* b = std::get_if<BlockInitSpec>(&init)) b->validate();
  if (const auto* g = std::get_if<GaussianInit>(&init))
    if (!(g->sigma >= 0.0)) throw Error(Errc::kInvalidArgument, "gaussian sigma must be >= 0");
}

Grid box_smooth(const Grid& grid, std::size_t k) {
  if (k == 0 || k % 2 == 0) throw Error(Errc::kInvalidArgument, "kernel size must be odd");
  if (k == 1 || grid.empty()) return grid;
  const std::size_t half = k / 2;
  Grid tmp(grid.rows(), grid.cols());
  Grid out(grid.rows(), grid.cols());
  for (std::size_t r = 0; r < grid.rows(); ++r)
    box_line(grid.row(r).data(), tmp.row(r).data(), grid.cols(), 1, half);
  for (std::size_t c = 0; c < grid.cols(); ++c)
    box_line(tmp.data().data() + c, out.data().data() + c, grid.rows(), grid.cols(), half);
  return out;
}

Mask init_mask_blocks(const BlockInitSpec& spec, std::size_t frames, std::size_t bins) {
  spec.validate();
  if (frames == 0 || bins == 0) throw Error(Errc::kInvalidArgument, "mask shape must be positive");
  if (spec.width_range.first > frames || spec.height_range.first > bins)
    throw Error(Errc::kBlockTooLarge,
                "smallest block " + std::to_string(spec.width_range.first) + "x" +
                    std::to_string(spec.height_range.first) + " exceeds grid " +
                    std::to_string(frames) + "x" + std::to_string(bins));

  std::mt19937_64 rng(spec.seed);
  Grid g(frames, bins);
  const std::size_t w_hi = std::min(spec.width_range.second, frames);
  const std::size_t h_hi = std::min(spec.height_range.second, bins);
  for (int b = 0; b < spec.n_blocks; ++b) {
    const auto w = std::uniform_int_distribution<std::size_t>(spec.width_range.first, w_hi)(rng);
    const auto h = std::uniform_int_distribution<std::size_t>(spec.height_range.first, h_hi)(rng);
    const auto f0 = std::uniform_int_distribution<std::size_t>(0, frames - w)(rng);
    const auto b0 = std::uniform_int_distribution<std::size_t>(0, bins - h)(rng);
    const double gain =
        std::uniform_real_distribution<double>(spec.gain_range.first, spec.gain_range.second)(rng);
    for (std::size_t f = f0; f < f0 + w; ++f)
      for (std::size_t k = b0; k < b0 + h; ++k) g(f, k) += gain;
  }
  return Mask(box_smooth(g, spec.smoothing_kernel));
}

Mask init_mask_gaussian(const GaussianInit& spec, std::size_t frames, std::size_t bins) {
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> dist(0.0, spec.sigma);
  Mask m(frames, bins);
  if (spec.sigma > 0.0)
    for (double& v : m.values.data()) v = dist(rng);
  return m;
}

Mask init_mask(const MaskInit& init, std::size_t frames, std::size_t bins) {
  if (const auto* b = std::get_if<BlockInitSpec>(&init)) return init_mask_blocks(*b, frames, bins);
  if (const auto* g = std::get_if<GaussianInit>(&init)) return init_mask_gaussian(*g, frames, bins);
  return Mask(frames, bins);
}

ObjectiveEval objective(const ScorerModel& model, const Spectrogram& x, const Mask& m,
                        double alpha, double beta) {
  check_shape(x, m);
  const auto& mv = m.values.data();
  const auto n = static_cast<double>(mv.size());

  Grid shifted = x.log_mag;
  for (std::size_t i = 0; i < mv.size(); ++i) shifted.data()[i] += mv[i];
  auto sg = score_with_gradient(model, shifted);

  double sum = 0.0;
  double sq = 0.0;
  for (double v : mv) {
    sum += v;
    sq += v * v;
  }
  const double mean = sum / n;
  double var = 0.0;
  for (double v : mv) var += (v - mean) * (v - mean);
  var /= n;

  ObjectiveEval out;
  out.terms.score = sg.score;
  out.terms.proximity = sq;
  out.terms.variance = var;
  out.terms.value = sg.score + alpha * sq + beta * var;
  out.grad = Mask(std::move(sg.grad));
  auto& g = out.grad.values.data();
  const double var_scale = 2.0 * beta / n;
  for (std::size_t i = 0; i < mv.size(); ++i)
    g[i] += 2.0 * alpha * mv[i] + var_scale * (mv[i] - mean);
  return out;
}

std::string_view stop_reason_name(StopReason reason) {
  switch (reason) {
    case StopReason::kTargetReached: return "target_reached";
    case StopReason::kMaxIters: return "max_iters";
    case StopReason::kStalled: return "stalled";
  }
  return "unknown";
}

MaskOptResult optimize_mask(const ScorerModel& model, const Spectrogram& x,
                            const OptimConfig& config, const IterationCallback& on_iter) {
  config.validate();
  MaskOptResult result;
  Mask m = init_mask(config.init, x.frames(), x.bins());
  ObjectiveEval cur = objective(model, x, m, config.alpha, config.beta);

  for (int iter = 0; iter < config.max_iters; ++iter) {
    if (!std::isfinite(cur.terms.value))
      throw Error(Errc::kNonFiniteObjective, "objective is not finite at iteration " + std::to_string(iter));
    const TrajectoryPoint point{cur.terms.value, cur.terms.score, cur.terms.proximity, cur.terms.variance};
    result.trajectory.push_back(point);
    result.iterations_run = iter + 1;
    if (on_iter) on_iter(iter, point);

    if (cur.terms.score < config.target_score) {
      result.stopped_reason = StopReason::kTargetReached;
      break;
    }
    if (iter + 1 == config.max_iters) {
      result.stopped_reason = StopReason::kMaxIters;
      break;
    }

    double lr = config.learning_rate;
    bool accepted = false;
    for (int h = 0; h <= config.max_halvings; ++h, lr *= 0.5) {
      Mask cand = m;
      auto& cv = cand.values.data();
      const auto& gv = cur.grad.values.data();
      for (std::size_t i = 0; i < cv.size(); ++i) cv[i] -= lr * gv[i];
      ObjectiveEval next = objective(model, x, cand, config.alpha, config.beta);
      if (std::isfinite(next.terms.value) && next.terms.value <= cur.terms.value) {
        m = std::move(cand);
        cur = std::move(next);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      result.stopped_reason = StopReason::kStalled;
      break;
    }
  }
  result.mask = std::move(m);
  return result;
}

double mask_total_variation(const Mask& m) {
  const Grid& g = m.values;
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c + 1 < g.cols(); ++c, ++pairs) sum += std::abs(g(r, c + 1) - g(r, c));
  for (std::size_t r = 0; r + 1 < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c, ++pairs) sum += std::abs(g(r + 1, c) - g(r, c));
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

void write_trajectory_csv(const std::filesystem::path& path,
                          const std::vector<TrajectoryPoint>& trajectory) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(Errc::kIoError, "cannot write " + path.string());
  out << "iter,objective,score,proximity,variance\n";
  char buf[160];
  for (std::size_t i = 0; i < trajectory.size(); ++i) {
    const auto& p = trajectory[i];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g\n", i, p.objective, p.score,
                  p.proximity, p.variance);
    out << buf;
  }
  if (!out) throw Error(Errc::kIoError, "short write to " + path.string());
}

}  // namespace neqm
