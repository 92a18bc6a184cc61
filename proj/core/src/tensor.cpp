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
#include "neqm/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "neqm/error.hpp"

namespace neqm {

std::string Shape3::str() const {
  return "(" + std::to_string(c) + "," + std::to_string(h) + "," + std::to_string(w) + ")";
}

Tensor::Tensor(Shape3 shape, std::vector<double> data) : shape_(shape), data_(std::move(data)) {
  if (data_.size() != shape_.size())
    throw Error(Errc::kShapeMismatch, "tensor data has " + std::to_string(data_.size()) +
                                          " values for shape " + shape_.str());
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace neqm
