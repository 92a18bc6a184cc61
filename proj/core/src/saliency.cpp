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
#include "neqm/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neqm/error.hpp"

namespace neqm {
namespace {

// Index of the global-average-pool layer of a conv-relu-GAP-dense(1)-sigmoid head.
std::size_t cam_head_index(const Network& net) {
  const std::size_t n = net.size();
  if (n < 5 || net[n - 5].kind != LayerKind::kConv2d || net[n - 4].kind != LayerKind::kRelu ||
      net[n - 3].kind != LayerKind::kGlobalAvgPool || net[n - 2].kind != LayerKind::kDense ||
      net[n - 1].kind != LayerKind::kSigmoid || net[n - 2].out_channels != 1)
    throw Error(Errc::kArchitectureMismatch,
                "class activation maps need a conv-relu-global_avg_pool-dense(1)-sigmoid head");
  return n - 3;
}

}  // namespace

std::string_view saliency_method_name(SaliencyMethod method) {
  return method == SaliencyMethod::kCam ? "cam" : "input_gradient";
}

Grid upsample_bilinear(const Grid& src, std::size_t rows, std::size_t cols) {
  if (src.empty()) throw Error(Errc::kInvalidArgument, "cannot upsample an empty grid");
  Grid out(rows, cols);
  auto coord = [](std::size_t i, std::size_t dst, std::size_t n) {
    return dst <= 1 ? 0.0
                    : static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(dst - 1);
  };
  for (std::size_t r = 0; r < rows; ++r) {
    const double sy = coord(r, rows, src.rows());
    const auto y0 = static_cast<std::size_t>(std::floor(sy));
    const std::size_t y1 = std::min(y0 + 1, src.rows() - 1);
    const double fy = sy - static_cast<double>(y0);
    for (std::size_t c = 0; c < cols; ++c) {
      const double sx = coord(c, cols, src.cols());
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const std::size_t x1 = std::min(x0 + 1, src.cols() - 1);
      const double fx = sx - static_cast<double>(x0);
      const double top = src(y0, x0) * (1.0 - fx) + src(y0, x1) * fx;
      const double bottom = src(y1, x0) * (1.0 - fx) + src(y1, x1) * fx;
      out(r, c) = top * (1.0 - fy) + bottom * fy;
    }
  }
  return out;
}

Grid cam_pooled(const ScorerModel& model, const Spectrogram& spec) {
  const std::size_t gap = cam_head_index(model.layers);
  const auto fwd = forward(model.layers, scorer_input(model, spec.log_mag), ForwardMode::eval());
  const Tensor& features = fwd.cache.inputs[gap];
  const auto& w = model.layers[gap + 1].weights;
  const Shape3 s = features.shape();
  Grid pooled(s.h, s.w);
  for (std::size_t k = 0; k < s.c; ++k) {
    const auto plane = features.plane(k);
    for (std::size_t i = 0; i < plane.size(); ++i) pooled.data()[i] += w[k] * plane[i];
  }
  return pooled;
}

SaliencyMap cam(const ScorerModel& model, const Spectrogram& spec) {
  return {upsample_bilinear(cam_pooled(model, spec), model.input_frames, model.input_bins),
          SaliencyMethod::kCam};
}

SaliencyMap input_gradient_saliency(const ScorerModel& model, const Spectrogram& spec) {
  auto sg = score_with_gradient(model, spec.log_mag);
  for (double& v : sg.grad.data()) v = std::abs(v);
  return {std::move(sg.grad), SaliencyMethod::kInputGradient};
}

}  // namespace neqm
