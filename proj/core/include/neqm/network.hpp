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
#include <optional>
#include <string_view>
#include <vector>

#include "neqm/tensor.hpp"

namespace neqm {

enum class LayerKind { kConv2d, kRelu, kMaxPool2x2, kGlobalAvgPool, kDense, kSigmoid, kDropout };

std::string_view layer_kind_name(LayerKind kind);
std::optional<LayerKind> parse_layer_kind(std::string_view name);

// One layer and its parameters. Conv2d is 3x3, stride 1, zero padding 1,
// weights laid out [out][in][ky][kx]; dense weights are [out][in]. Both
// carry one bias per output channel.
struct Layer {
  LayerKind kind = LayerKind::kRelu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  double rate = 0.0;  // dropout only
  std::vector<double> weights;
  std::vector<double> biases;

  static Layer conv2d(std::size_t in, std::size_t out);
  static Layer dense(std::size_t in, std::size_t out);
  static Layer of_kind(LayerKind kind) {
    Layer l;
    l.kind = kind;
    return l;
  }
  static Layer relu() { return of_kind(LayerKind::kRelu); }
  static Layer maxpool2x2() { return of_kind(LayerKind::kMaxPool2x2); }
  static Layer global_avg_pool() { return of_kind(LayerKind::kGlobalAvgPool); }
  static Layer sigmoid() { return of_kind(LayerKind::kSigmoid); }
  static Layer dropout(double rate);

  bool has_params() const noexcept {
    return kind == LayerKind::kConv2d || kind == LayerKind::kDense;
  }
  Shape3 output_shape(Shape3 input, std::size_t index) const;

  friend bool operator==(const Layer&, const Layer&) = default;
};

using Network = std::vector<Layer>;

// Shape of the final output; throws ShapeMismatch naming the first layer
// that cannot accept its input.
Shape3 validate_network(const Network& net, Shape3 input);

// Glorot-uniform weights, zero biases.
void init_network(Network& net, uint64_t seed);

struct ForwardMode {
  bool train = false;
  uint64_t seed = 0;  // dropout masks in train mode

  static ForwardMode eval() { return {}; }
  static ForwardMode training(uint64_t seed) { return {true, seed}; }
};

struct ForwardCache {
  std::vector<Tensor> inputs;                     // input seen by each layer
  std::vector<std::vector<uint32_t>> argmax;      // maxpool routing
  std::vector<std::vector<double>> dropout_scale; // 0 or 1/(1-rate)
  Tensor output;
};

struct ForwardResult {
  Tensor output;
  ForwardCache cache;
};

ForwardResult forward(const Network& net, const Tensor& input, ForwardMode mode);

// Output only, no cache retained.
Tensor predict(const Network& net, const Tensor& input);

struct Gradients {
  std::vector<std::vector<double>> weights;
  std::vector<std::vector<double>> biases;

  static Gradients zeros_like(const Network& net);
  void accumulate(const Gradients& other);
  void scale(double factor);
};

struct BackwardResult {
  Gradients params;  // empty vectors when parameter gradients are skipped
  Tensor input_grad;
};

BackwardResult backward(const Network& net, const ForwardCache& cache, const Tensor& upstream,
                        bool want_param_grads = true);

// w <- w - lr * g
void sgd_step(Network& net, const Gradients& grads, double learning_rate);

// First and second moment estimates for Adam, one slot per parameter.
struct AdamState {
  Gradients m;
  Gradients v;
  long long steps = 0;

  static AdamState for_network(const Network& net);
};

struct AdamHyper {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Bias-corrected Adam: w <- w - lr * m_hat / (sqrt(v_hat) + eps).
void adam_step(Network& net, const Gradients& grads, AdamState& state, double learning_rate,
               const AdamHyper& hyper = {});

}  // namespace neqm
