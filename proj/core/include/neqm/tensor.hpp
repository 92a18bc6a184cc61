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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace neqm {

// (channels, height, width); flat vectors use (n, 1, 1).
struct Shape3 {
  std::size_t c = 0;
  std::size_t h = 0;
  std::size_t w = 0;

  std::size_t size() const noexcept { return c * h * w; }
  std::string str() const;
  friend bool operator==(const Shape3&, const Shape3&) = default;
};

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape3 shape, double fill = 0.0) : shape_(shape), data_(shape.size(), fill) {}
  Tensor(Shape3 shape, std::vector<double> data);

  const Shape3& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t c, std::size_t y, std::size_t x) {
    return data_[(c * shape_.h + y) * shape_.w + x];
  }
  double at(std::size_t c, std::size_t y, std::size_t x) const {
    return data_[(c * shape_.h + y) * shape_.w + x];
  }

  std::span<double> plane(std::size_t c) { return {data_.data() + c * shape_.h * shape_.w, shape_.h * shape_.w}; }
  std::span<const double> plane(std::size_t c) const {
    return {data_.data() + c * shape_.h * shape_.w, shape_.h * shape_.w};
  }

  std::vector<double>& data() noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape3 shape_;
  std::vector<double> data_;
};

}  // namespace neqm
