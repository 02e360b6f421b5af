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

#include "diff/tensor.hpp"

#include "errors.hpp"

namespace sluice::diff {

std::string Shape::str() const {
  if (rank == 1) return "[" + std::to_string(rows) + "]";
  return "[" + std::to_string(rows) + "x" + std::to_string(cols) + "]";
}

Tensor::Tensor(Shape shape, std::vector<double> values)
    : shape_(shape), values_(std::move(values)) {
  if (shape_.size() != values_.size()) {
    throw DimensionError("tensor shape " + shape_.str() + " holds " +
                         std::to_string(shape_.size()) + " values, got " +
                         std::to_string(values_.size()));
  }
  if (shape_.rank == 1 && shape_.cols != 1) {
    throw DimensionError("rank-1 shape must have cols == 1");
  }
}

Tensor Tensor::zeros(Shape shape) {
  return Tensor(shape, std::vector<double>(shape.size(), 0.0));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return vector(std::vector<double>(values));
}

Tensor Tensor::vector(std::vector<double> values) {
  const auto n = values.size();
  return Tensor(Shape::vec(n), std::move(values));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols,
                      std::vector<double> values) {
  return Tensor(Shape::mat(rows, cols), std::move(values));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t = zeros(Shape::mat(n, n));
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

}  // namespace sluice::diff
