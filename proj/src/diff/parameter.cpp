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

#include "diff/parameter.hpp"

#include <cmath>

#include "errors.hpp"

namespace sluice::diff {

Parameter::Parameter(std::string name, Tensor init)
    : name_(std::move(name)),
      value_(std::move(init)),
      grad_(value_.size(), 0.0) {}

void Parameter::accumulate_grad(std::span<const double> g) {
  if (g.size() != grad_.size()) {
    throw DimensionError("gradient for " + name_ + " has " +
                         std::to_string(g.size()) + " entries, expected " +
                         std::to_string(grad_.size()));
  }
  if (frozen_.empty()) {
    for (std::size_t i = 0; i < g.size(); ++i) grad_[i] += g[i];
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!frozen_[i]) grad_[i] += g[i];
    }
  }
  has_grad_ = true;
}

void Parameter::zero_grad() {
  std::fill(grad_.begin(), grad_.end(), 0.0);
  has_grad_ = false;
}

double Parameter::grad_norm() const {
  double s = 0.0;
  for (double g : grad_) s += g * g;
  return std::sqrt(s);
}

void Parameter::set_frozen(std::vector<bool> mask) {
  if (!mask.empty() && mask.size() != value_.size()) {
    throw DimensionError("frozen mask for " + name_ + " has wrong length");
  }
  frozen_ = std::move(mask);
}

void Parameter::freeze_all() { frozen_.assign(value_.size(), true); }

std::size_t Parameter::trainable_count() const {
  if (frozen_.empty()) return value_.size();
  std::size_t n = 0;
  for (bool f : frozen_) n += f ? 0 : 1;
  return n;
}

void sgd_step(std::span<Parameter* const> params, double lr) {
  if (!(lr >= 0.0) || !std::isfinite(lr)) {
    throw ContractError("sgd_step needs a finite, non-negative learning rate");
  }
  bool any = false;
  for (const Parameter* p : params) any = any || p->has_grad();
  if (!any) throw ContractError("sgd_step called before backward()");

  for (Parameter* p : params) {
    if (!p->has_grad()) continue;
    auto values = p->mutable_value().mutable_values();
    auto grad = p->grad();
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (p->is_frozen(i)) continue;
      values[i] -= lr * grad[i];
    }
    p->zero_grad();
  }
}

}  // namespace sluice::diff
