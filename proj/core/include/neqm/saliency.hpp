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

#include <string_view>

#include "neqm/scorer.hpp"

namespace neqm {

enum class SaliencyMethod { kCam, kInputGradient };
std::string_view saliency_method_name(SaliencyMethod method);

struct SaliencyMap {
  Grid values;  // scorer input shape
  SaliencyMethod method = SaliencyMethod::kCam;
};

// Exact class activation map: sum_k w_k A_k over the final conv feature maps,
// where w is the dense head behind global average pooling. Positive values
// push the score toward 1 (cheap). Upsampled bilinearly, corners aligned.
SaliencyMap cam(const ScorerModel& model, const Spectrogram& spec);

// Pooled-resolution map before upsampling.
Grid cam_pooled(const ScorerModel& model, const Spectrogram& spec);

// |d score / d log_mag| in eval mode.
SaliencyMap input_gradient_saliency(const ScorerModel& model, const Spectrogram& spec);

// Corner-aligned bilinear resampling of a grid to rows x cols.
Grid upsample_bilinear(const Grid& src, std::size_t rows, std::size_t cols);

}  // namespace neqm
