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
#include <cstdint>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "diff/parameter.hpp"
#include "diff/tensor.hpp"

namespace sluice::diff {

class Tape;

enum class Op : std::uint8_t {
  kConstant,
  kParam,
  kAdd,
  kSub,
  kMul,
  kTanh,
  kSigmoid,
  kMatMul,
  kConcat,
  kSlice,
  kGather,
  kGatherRows,
  kTranspose,
  kReshape,
  kSum,
  kScale,
  kScaleConst,
  kFrobeniusSq,
  kCrossFrobeniusSq,
  kSoftmaxXent,
};

std::string_view op_name(Op op);

// Handle to a node recorded on a Tape. Cheap to copy; only valid while the
// tape is alive.
struct Var {
  Tape* tape = nullptr;
  std::uint32_t id = 0;

  const Shape& shape() const;
  std::size_t size() const { return shape().size(); }
};

// Append-only record of a forward computation. Nodes are stored in the order
// they were created, which is a topological order: every input precedes its
// consumer. backward() walks the record once in reverse and may only be
// called once per tape.
class Tape {
 public:
  Tape();
  ~Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(const Tensor& t);
  Var constant(Shape shape, std::span<const double> values);
  // Registers a parameter leaf. Registering the same parameter twice returns
  // the existing node.
  Var param(Parameter& p);

  std::span<const double> values(Var v) const;
  Tensor value(Var v) const;
  double scalar(Var v) const;
  const Shape& shape(Var v) const { return nodes_[v.id].shape; }
  Op op(Var v) const { return nodes_[v.id].op; }
  std::vector<std::uint32_t> inputs(Var v) const;
  std::size_t node_count() const { return nodes_.size(); }

  // Populates gradients of every node reachable from `loss` (a 1-element
  // tensor) and accumulates them into the registered parameters.
  void backward(Var loss);
  bool consumed() const { return consumed_; }
  // Gradient of any recorded node; valid after backward().
  std::span<const double> grad(Var v) const;

  // Recording interface used by the op functions below.
  struct Node {
    Op op = Op::kConstant;
    Shape shape;
    std::size_t offset = 0;
    std::uint32_t a = kNone;
    std::uint32_t b = kNone;
    std::uint32_t list_offset = 0;  // into ids_
    std::uint32_t list_size = 0;
    std::size_t aux = 0;  // slice start / gold label / concat axis / cache
    double scalar = 0.0;
    Parameter* param = nullptr;
  };
  static constexpr std::uint32_t kNone = 0xffffffffu;

  Var record(Node node);
  Node& node(std::uint32_t id) { return nodes_[id]; }
  const Node& node(std::uint32_t id) const { return nodes_[id]; }
  double* data(std::uint32_t id) { return values_.data() + nodes_[id].offset; }
  const double* data(std::uint32_t id) const {
    return values_.data() + nodes_[id].offset;
  }
  std::uint32_t push_list(std::span<const std::uint32_t> ids);
  const std::uint32_t* list(const Node& n) const {
    return ids_.data() + n.list_offset;
  }
  std::size_t push_cache(std::span<const double> values);
  const double* cache(std::size_t offset) const { return cache_.data() + offset; }
  void check_finite(Var v) const;

 private:
  void backprop_node(std::uint32_t id);

  std::vector<Node> nodes_;
  std::vector<double> values_;
  std::vector<double> grads_;
  std::vector<std::uint32_t> ids_;
  std::vector<double> cache_;
  std::unordered_map<const Parameter*, std::uint32_t> params_;
  bool consumed_ = false;
};

inline const Shape& Var::shape() const { return tape->shape(*this); }

// Elementwise ops. Binary forms require identical shapes.
enum class Elementwise { kAdd, kMul, kTanh, kSigmoid };
Var elementwise(Elementwise kind, std::span<const Var> args);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var tanh(Var a);
Var sigmoid(Var a);

// a [n x k] times b [k x m] (or b [k] -> result [n]).
Var matmul(Var a, Var b);

// Concatenation along `axis`. Rank-1 inputs accept axis 0 only; rank-2
// inputs accept 0 (stack rows) or 1 (join columns).
Var concat(std::span<const Var> parts, int axis = 0);
// Rank-1 inputs of equal length d become the rows of an [n x d] matrix.
Var stack(std::span<const Var> rows);

// Contiguous range [start, start + len) of a rank-1 tensor.
Var slice(Var a, std::size_t start, std::size_t len);
// Row i of a matrix as a rank-1 tensor.
Var row(Var a, std::size_t i);
// out[i] = a.flat[index[i]]; `shape` gives the result extent.
Var gather(Var a, std::span<const std::uint32_t> index, Shape shape);
// Rows of a 2-D tensor in the given order; repeats are allowed.
Var gather_rows(Var m, std::span<const std::uint32_t> rows);
Var transpose(Var a);
Var reshape(Var a, Shape shape);
Var sum(Var a);
// s must hold a single value.
Var scale(Var a, Var s);
Var scale(Var a, double c);
// Sum of squared entries of a 2-D tensor.
Var frobenius_sq(Var m);
// ||A B^T||_F^2 for 2-D A and B with equal column counts, without
// materializing the transpose.
Var cross_frobenius_sq(Var a, Var b);
// -log softmax(logits)[gold], computed with max subtraction.
Var softmax_cross_entropy(Var logits, std::size_t gold);

// Numerically stable softmax of plain values (no recording).
std::vector<double> softmax(std::span<const double> logits);

}  // namespace sluice::diff
