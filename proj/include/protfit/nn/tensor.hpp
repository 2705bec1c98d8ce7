// Copyright (c) 2026 The protfit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
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

namespace protfit::nn {

#ifdef PROTFIT_FLOAT32
using Scalar = float;
inline constexpr const char* kPrecisionName = "f32";
#else
using Scalar = double;
inline constexpr const char* kPrecisionName = "f64";
#endif

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);
std::string shape_string(const Shape& shape);

/// Dense row-major tensor owning its storage.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, Scalar fill = Scalar(0));
  Tensor(Shape shape, std::vector<Scalar> values);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t axis) const { return shape_.at(axis); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }
  std::span<Scalar> values() { return data_; }
  std::span<const Scalar> values() const { return data_; }

  Scalar& operator[](std::size_t i) { return data_[i]; }
  Scalar operator[](std::size_t i) const { return data_[i]; }

  /// Trailing-axis extent (feature width).
  std::size_t last_dim() const { return shape_.empty() ? 1 : shape_.back(); }
  /// Product of all but the last axis.
  std::size_t rows() const { return shape_.empty() ? 1 : size() / shape_.back(); }

  void fill(Scalar v);
  Tensor reshaped(Shape shape) const;

  /// Bitwise equality of shape and data.
  bool identical(const Tensor& other) const;

 private:
  Shape shape_;
  std::vector<Scalar> data_;
};

}  // namespace protfit::nn
