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

#include "neqm/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "neqm/error.hpp"

namespace neqm {
namespace {

uint64_t layer_seed(uint64_t seed, std::size_t index) {
  uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

[[noreturn]] void shape_error(std::size_t index, const Layer& layer, const std::string& why) {
  throw Error(Errc::kShapeMismatch, "layer " + std::to_string(index) + " (" +
                                        std::string(layer_kind_name(layer.kind)) + "): " + why);
}

// out[x] += w0*in[x-1] + w1*in[x] + w2*in[x+1] with zero padding.
inline void conv_row_3(double* out, const double* in, std::size_t width, const double* w) {
  if (width == 1) {
    out[0] += w[1] * in[0];
    return;
  }
  out[0] += w[1] * in[0] + w[2] * in[1];
  for (std::size_t x = 1; x + 1 < width; ++x)
    out[x] += w[0] * in[x - 1] + w[1] * in[x] + w[2] * in[x + 1];
  out[width - 1] += w[0] * in[width - 2] + w[1] * in[width - 1];
}

// Transpose of conv_row_3: gin[x] += w0*g[x+1] + w1*g[x] + w2*g[x-1].
inline void conv_row_3_t(double* gin, const double* g, std::size_t width, const double* w) {
  if (width == 1) {
    gin[0] += w[1] * g[0];
    return;
  }
  gin[0] += w[0] * g[1] + w[1] * g[0];
  for (std::size_t x = 1; x + 1 < width; ++x)
    gin[x] += w[0] * g[x + 1] + w[1] * g[x] + w[2] * g[x - 1];
  gin[width - 1] += w[1] * g[width - 1] + w[2] * g[width - 2];
}

Tensor conv_forward(const Layer& L, const Tensor& in) {
  const auto [cin, h, w] = in.shape();
  Tensor out({L.out_channels, h, w});
  for (std::size_t oc = 0; oc < L.out_channels; ++oc) {
    auto dst = out.plane(oc);
    std::fill(dst.begin(), dst.end(), L.biases[oc]);
    for (std::size_t ic = 0; ic < cin; ++ic) {
      const double* k = &L.weights[(oc * cin + ic) * 9];
      const auto src = in.plane(ic);
      for (std::size_t y = 0; y < h; ++y) {
        double* orow = dst.data() + y * w;
        for (std::size_t ky = 0; ky < 3; ++ky) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
          conv_row_3(orow, src.data() + iy * w, w, k + 3 * ky);
        }
      }
    }
  }
  return out;
}

void conv_backward(const Layer& L, const Tensor& in, const Tensor& gout, Tensor& gin,
                   std::vector<double>* gw, std::vector<double>* gb) {
  const auto [cin, h, w] = in.shape();
  gin = Tensor(in.shape());
  for (std::size_t oc = 0; oc < L.out_channels; ++oc) {
    const auto g = gout.plane(oc);
    if (gb) {
      double s = 0.0;
      for (double v : g) s += v;
      (*gb)[oc] += s;
    }
    for (std::size_t ic = 0; ic < cin; ++ic) {
      const double* k = &L.weights[(oc * cin + ic) * 9];
      const auto src = in.plane(ic);
      auto dst = gin.plane(ic);
      double acc[9] = {0, 0, 0, 0, 0, 0, 0, 0, 0};
      for (std::size_t y = 0; y < h; ++y) {
        const double* grow = g.data() + y * w;
        for (std::size_t ky = 0; ky < 3; ++ky) {
          const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(y + ky) - 1;
          if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(h)) continue;
          conv_row_3_t(dst.data() + iy * w, grow, w, k + 3 * ky);
          if (gw) {
            const double* irow = src.data() + iy * w;
            // kx = 1 (aligned), kx = 0 (in[x-1]), kx = 2 (in[x+1])
            double s0 = 0.0, s1 = 0.0, s2 = 0.0;
            for (std::size_t x = 0; x < w; ++x) s1 += grow[x] * irow[x];
            for (std::size_t x = 1; x < w; ++x) s0 += grow[x] * irow[x - 1];
            for (std::size_t x = 0; x + 1 < w; ++x) s2 += grow[x] * irow[x + 1];
            acc[3 * ky] += s0;
            acc[3 * ky + 1] += s1;
            acc[3 * ky + 2] += s2;
          }
        }
      }
      if (gw)
        for (int t = 0; t < 9; ++t) (*gw)[(oc * cin + ic) * 9 + t] += acc[t];
    }
  }
}

}  // namespace

std::string_view layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kMaxPool2x2: return "maxpool2x2";
    case LayerKind::kGlobalAvgPool: return "global_avg_pool";
    case LayerKind::kDense: return "dense";
    case LayerKind::kSigmoid: return "sigmoid";
    case LayerKind::kDropout: return "dropout";
  }
  return "unknown";
}

std::optional<LayerKind> parse_layer_kind(std::string_view name) {
  for (auto k : {LayerKind::kConv2d, LayerKind::kRelu, LayerKind::kMaxPool2x2,
                 LayerKind::kGlobalAvgPool, LayerKind::kDense, LayerKind::kSigmoid,
                 LayerKind::kDropout})
    if (layer_kind_name(k) == name) return k;
  return std::nullopt;
}

Layer Layer::conv2d(std::size_t in, std::size_t out) {
  Layer l = of_kind(LayerKind::kConv2d);
  l.in_channels = in;
  l.out_channels = out;
  l.weights.assign(in * out * 9, 0.0);
  l.biases.assign(out, 0.0);
  return l;
}

Layer Layer::dense(std::size_t in, std::size_t out) {
  Layer l = of_kind(LayerKind::kDense);
  l.in_channels = in;
  l.out_channels = out;
  l.weights.assign(in * out, 0.0);
  l.biases.assign(out, 0.0);
  return l;
}

Layer Layer::dropout(double rate) {
  if (!(rate >= 0.0 && rate < 1.0))
    throw Error(Errc::kInvalidArgument, "dropout rate must lie in [0, 1)");
  Layer l = of_kind(LayerKind::kDropout);
  l.rate = rate;
  return l;
}

Shape3 Layer::output_shape(Shape3 in, std::size_t index) const {
  switch (kind) {
    case LayerKind::kConv2d:
      if (in.c != in_channels)
        shape_error(index, *this, "expects " + std::to_string(in_channels) +
                                      " channels, got input " + in.str());
      if (weights.size() != in_channels * out_channels * 9 || biases.size() != out_channels)
        shape_error(index, *this, "parameter count does not match channels");
      if (in.h == 0 || in.w == 0) shape_error(index, *this, "empty spatial input");
      return {out_channels, in.h, in.w};
    case LayerKind::kDense:
      if (in.size() != in_channels)
        shape_error(index, *this, "expects " + std::to_string(in_channels) +
                                      " features, got input " + in.str());
      if (weights.size() != in_channels * out_channels || biases.size() != out_channels)
        shape_error(index, *this, "parameter count does not match features");
      return {out_channels, 1, 1};
    case LayerKind::kMaxPool2x2:
      if (in.h < 2 || in.w < 2) shape_error(index, *this, "input " + in.str() + " smaller than 2x2");
      return {in.c, in.h / 2, in.w / 2};
    case LayerKind::kGlobalAvgPool:
      if (in.h == 0 || in.w == 0) shape_error(index, *this, "empty spatial input");
      return {in.c, 1, 1};
    case LayerKind::kDropout:
      if (!(rate >= 0.0 && rate < 1.0)) shape_error(index, *this, "rate outside [0, 1)");
      return in;
    case LayerKind::kRelu:
    case LayerKind::kSigmoid:
      return in;
  }
  return in;
}

Shape3 validate_network(const Network& net, Shape3 input) {
  for (std::size_t i = 0; i < net.size(); ++i) input = net[i].output_shape(input, i);
  return input;
}

void init_network(Network& net, uint64_t seed) {
  std::mt19937_64 rng(seed);
  for (auto& l : net) {
    if (!l.has_params()) continue;
    const double taps = l.kind == LayerKind::kConv2d ? 9.0 : 1.0;
    const double fan_in = static_cast<double>(l.in_channels) * taps;
    const double fan_out = static_cast<double>(l.out_channels) * taps;
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : l.weights) w = dist(rng);
    std::fill(l.biases.begin(), l.biases.end(), 0.0);
  }
}

ForwardResult forward(const Network& net, const Tensor& input, ForwardMode mode) {
  validate_network(net, input.shape());
  ForwardResult r;
  auto& cache = r.cache;
  cache.inputs.reserve(net.size());
  cache.argmax.resize(net.size());
  cache.dropout_scale.resize(net.size());

  Tensor x = input;
  for (std::size_t i = 0; i < net.size(); ++i) {
    const Layer& L = net[i];
    cache.inputs.push_back(x);
    const Shape3 s = x.shape();
    switch (L.kind) {
      case LayerKind::kConv2d:
        x = conv_forward(L, x);
        break;
      case LayerKind::kRelu:
        // NaN passes through so a bad input cannot hide behind the nonlinearity.
        for (double& v : x.data())
          if (v < 0.0) v = 0.0;
        break;
      case LayerKind::kMaxPool2x2: {
        Tensor out({s.c, s.h / 2, s.w / 2});
        auto& route = cache.argmax[i];
        route.resize(out.size());
        std::size_t o = 0;
        for (std::size_t c = 0; c < s.c; ++c)
          for (std::size_t y = 0; y < s.h / 2; ++y)
            for (std::size_t xx = 0; xx < s.w / 2; ++xx, ++o) {
              // Scan in increasing flat index; strict > keeps the lowest on ties.
              // A NaN candidate wins so it propagates.
              std::size_t best = (c * s.h + 2 * y) * s.w + 2 * xx;
              const std::size_t cands[3] = {best + 1, best + s.w, best + s.w + 1};
              for (std::size_t cand : cands)
                if (x[cand] > x[best] || std::isnan(x[cand])) best = cand;
              out[o] = x[best];
              route[o] = static_cast<uint32_t>(best);
            }
        x = std::move(out);
        break;
      }
      case LayerKind::kGlobalAvgPool: {
        Tensor out({s.c, 1, 1});
        const double inv = 1.0 / static_cast<double>(s.h * s.w);
        for (std::size_t c = 0; c < s.c; ++c) {
          double sum = 0.0;
          for (double v : x.plane(c)) sum += v;
          out[c] = sum * inv;
        }
        x = std::move(out);
        break;
      }
      case LayerKind::kDense: {
        Tensor out({L.out_channels, 1, 1});
        for (std::size_t o = 0; o < L.out_channels; ++o) {
          double sum = L.biases[o];
          const double* wrow = &L.weights[o * L.in_channels];
          for (std::size_t k = 0; k < L.in_channels; ++k) sum += wrow[k] * x[k];
          out[o] = sum;
        }
        x = std::move(out);
        break;
      }
      case LayerKind::kSigmoid:
        for (double& v : x.data())
          v = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
        break;
      case LayerKind::kDropout:
        if (mode.train && L.rate > 0.0) {
          std::mt19937_64 rng(layer_seed(mode.seed, i));
          std::uniform_real_distribution<double> u(0.0, 1.0);
          const double keep = 1.0 / (1.0 - L.rate);
          auto& scale = cache.dropout_scale[i];
          scale.resize(x.size());
          for (std::size_t k = 0; k < x.size(); ++k) {
            scale[k] = u(rng) < L.rate ? 0.0 : keep;
            x[k] *= scale[k];
          }
        }
        break;
    }
  }
  cache.output = x;
  r.output = std::move(x);
  return r;
}

Tensor predict(const Network& net, const Tensor& input) {
  return forward(net, input, ForwardMode::eval()).output;
}

Gradients Gradients::zeros_like(const Network& net) {
  Gradients g;
  for (const auto& l : net) {
    g.weights.emplace_back(l.weights.size(), 0.0);
    g.biases.emplace_back(l.biases.size(), 0.0);
  }
  return g;
}

void Gradients::accumulate(const Gradients& other) {
  for (std::size_t i = 0; i < weights.size(); ++i) {
    for (std::size_t k = 0; k < weights[i].size(); ++k) weights[i][k] += other.weights[i][k];
    for (std::size_t k = 0; k < biases[i].size(); ++k) biases[i][k] += other.biases[i][k];
  }
}

void Gradients::scale(double factor) {
  for (auto& v : weights)
    for (double& g : v) g *= factor;
  for (auto& v : biases)
    for (double& g : v) g *= factor;
}

BackwardResult backward(const Network& net, const ForwardCache& cache, const Tensor& upstream,
                        bool want_param_grads) {
  if (cache.inputs.size() != net.size() || cache.argmax.size() != net.size() ||
      cache.dropout_scale.size() != net.size())
    throw Error(Errc::kStaleCache, "cache holds " + std::to_string(cache.inputs.size()) +
                                       " layers, network has " + std::to_string(net.size()));
  if (upstream.shape() != cache.output.shape())
    throw Error(Errc::kStaleCache, "upstream gradient " + upstream.shape().str() +
                                       " does not match cached output " +
                                       cache.output.shape().str());

  BackwardResult r;
  if (want_param_grads) r.params = Gradients::zeros_like(net);
  Tensor g = upstream;
  for (std::size_t ii = net.size(); ii-- > 0;) {
    const Layer& L = net[ii];
    const Tensor& in = cache.inputs[ii];
    const Shape3 s = in.shape();
    if (L.output_shape(s, ii) != g.shape())
      throw Error(Errc::kStaleCache, "gradient shape mismatch at layer " + std::to_string(ii));
    switch (L.kind) {
      case LayerKind::kConv2d: {
        Tensor gin;
        conv_backward(L, in, g, gin, want_param_grads ? &r.params.weights[ii] : nullptr,
                      want_param_grads ? &r.params.biases[ii] : nullptr);
        g = std::move(gin);
        break;
      }
      case LayerKind::kRelu:
        for (std::size_t k = 0; k < g.size(); ++k)
          if (!(in[k] > 0.0)) g[k] = 0.0;
        break;
      case LayerKind::kMaxPool2x2: {
        const auto& route = cache.argmax[ii];
        if (route.size() != g.size())
          throw Error(Errc::kStaleCache, "maxpool routing size mismatch at layer " + std::to_string(ii));
        Tensor gin(s);
        for (std::size_t o = 0; o < g.size(); ++o) gin[route[o]] += g[o];
        g = std::move(gin);
        break;
      }
      case LayerKind::kGlobalAvgPool: {
        Tensor gin(s);
        const double inv = 1.0 / static_cast<double>(s.h * s.w);
        for (std::size_t c = 0; c < s.c; ++c) {
          const double v = g[c] * inv;
          auto p = gin.plane(c);
          std::fill(p.begin(), p.end(), v);
        }
        g = std::move(gin);
        break;
      }
      case LayerKind::kDense: {
        Tensor gin(s);
        for (std::size_t o = 0; o < L.out_channels; ++o) {
          const double go = g[o];
          const double* wrow = &L.weights[o * L.in_channels];
          for (std::size_t k = 0; k < L.in_channels; ++k) gin[k] += wrow[k] * go;
          if (want_param_grads) {
            double* gw = &r.params.weights[ii][o * L.in_channels];
            for (std::size_t k = 0; k < L.in_channels; ++k) gw[k] += go * in[k];
            r.params.biases[ii][o] += go;
          }
        }
        g = std::move(gin);
        break;
      }
      case LayerKind::kSigmoid: {
        // The cached input of the next layer (or the output) is sigmoid(x).
        const Tensor& y = ii + 1 < net.size() ? cache.inputs[ii + 1] : cache.output;
        for (std::size_t k = 0; k < g.size(); ++k) g[k] *= y[k] * (1.0 - y[k]);
        break;
      }
      case LayerKind::kDropout: {
        const auto& scale = cache.dropout_scale[ii];
        if (!scale.empty()) {
          if (scale.size() != g.size())
            throw Error(Errc::kStaleCache, "dropout mask size mismatch at layer " + std::to_string(ii));
          for (std::size_t k = 0; k < g.size(); ++k) g[k] *= scale[k];
        }
        break;
      }
    }
  }
  r.input_grad = std::move(g);
  return r;
}

namespace {

void check_matches(const Network& net, const Gradients& grads, const char* what) {
  if (grads.weights.size() != net.size() || grads.biases.size() != net.size())
    throw Error(Errc::kShapeMismatch, std::string(what) + " does not match network");
  for (std::size_t i = 0; i < net.size(); ++i)
    if (grads.weights[i].size() != net[i].weights.size() || grads.biases[i].size() != net[i].biases.size())
      throw Error(Errc::kShapeMismatch, std::string(what) + " shape mismatch at layer " + std::to_string(i));
}

}  // namespace

void sgd_step(Network& net, const Gradients& grads, double learning_rate) {
  check_matches(net, grads, "gradient set");
  for (std::size_t i = 0; i < net.size(); ++i) {
    auto& l = net[i];
    for (std::size_t k = 0; k < l.weights.size(); ++k) l.weights[k] -= learning_rate * grads.weights[i][k];
    for (std::size_t k = 0; k < l.biases.size(); ++k) l.biases[k] -= learning_rate * grads.biases[i][k];
  }
}

AdamState AdamState::for_network(const Network& net) {
  return {Gradients::zeros_like(net), Gradients::zeros_like(net), 0};
}

void adam_step(Network& net, const Gradients& grads, AdamState& state, double learning_rate,
               const AdamHyper& hyper) {
  check_matches(net, grads, "gradient set");
  check_matches(net, state.m, "adam state");
  check_matches(net, state.v, "adam state");
  ++state.steps;
  const double c1 = 1.0 - std::pow(hyper.beta1, static_cast<double>(state.steps));
  const double c2 = 1.0 - std::pow(hyper.beta2, static_cast<double>(state.steps));
  auto update = [&](std::vector<double>& w, const std::vector<double>& g, std::vector<double>& m,
                    std::vector<double>& v) {
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = hyper.beta1 * m[k] + (1.0 - hyper.beta1) * g[k];
      v[k] = hyper.beta2 * v[k] + (1.0 - hyper.beta2) * g[k] * g[k];
      w[k] -= learning_rate * (m[k] / c1) / (std::sqrt(v[k] / c2) + hyper.epsilon);
    }
  };
  for (std::size_t i = 0; i < net.size(); ++i) {
    update(net[i].weights, grads.weights[i], state.m.weights[i], state.v.weights[i]);
    update(net[i].biases, grads.biases[i], state.m.biases[i], state.v.biases[i]);
  }
}

}  // namespace neqm
