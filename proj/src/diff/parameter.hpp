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
#include <span>
#include <string>
#include <vector>

#include "diff/tensor.hpp"

namespace sluice::diff {

// A trainable leaf that outlives individual tapes. Gradients from every
// backward() pass accumulate here until sgd_step consumes them.
//
// Elements may be frozen: a frozen element never receives gradient and is
// never touched by sgd_step.
class Parameter {
 public:
  Parameter(std::string name, Tensor init);

  Parameter(const Parameter&) = delete;
  Parameter& operator=(const Parameter&) = delete;
  Parameter(Parameter&&) = default;
  Parameter& operator=(Parameter&&) = default;

  const std::string& name() const { return name_; }
  const Shape& shape() const { return value_.shape(); }
  std::size_t size() const { return value_.size(); }
  const Tensor& value() const { return value_; }
  Tensor& mutable_value() { return value_; }

  std::span<const double> grad() const { return grad_; }
  bool has_grad() const { return has_grad_; }
  void accumulate_grad(std::span<const double> g);
  void zero_grad();
  double grad_norm() const;

  void set_frozen(std::vector<bool> mask);
  void freeze_all();
  bool is_frozen(std::size_t i) const { return !frozen_.empty() && frozen_[i]; }
  std::size_t trainable_count() const;

 private:
  std::string name_;
  Tensor value_;
  std::vector<double> grad_;
  std::vector<bool> frozen_;
  bool has_grad_ = false;
};

// p <- p - lr * grad(p) for every non-frozen element, then zero all grads.
// Throws ContractError when no parameter in the set carries a gradient.
void sgd_step(std::span<Parameter* const> params, double lr);

}  // namespace sluice::diff
