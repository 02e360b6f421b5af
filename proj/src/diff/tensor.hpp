// Copyright 2026 The Sluice Authors. All Rights Reserved.
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
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace sluice::diff {

// Rank-1 or rank-2 extent. Rank-1 tensors are treated as column vectors by
// matmul.
struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 1;
  int rank = 1;

  static Shape vec(std::size_t n) { return {n, 1, 1}; }
  static Shape mat(std::size_t r, std::size_t c) { return {r, c, 2}; }
  static Shape scalar() { return vec(1); }

  std::size_t size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Dense row-major float64 values. Gradients live on the Tape (for recorded
// nodes) or on a Parameter.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values);

  static Tensor zeros(Shape shape);
  static Tensor vector(std::initializer_list<double> values);
  static Tensor vector(std::vector<double> values);
  static Tensor matrix(std::size_t rows, std::size_t cols,
                       std::vector<double> values);
  static Tensor identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> mutable_values() { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(std::size_t r, std::size_t c) const {
    return values_[r * shape_.cols + c];
  }
  double& at(std::size_t r, std::size_t c) {
    return values_[r * shape_.cols + c];
  }

 private:
  Shape shape_ = Shape::vec(0);
  std::vector<double> values_;
};

}  // namespace sluice::diff
