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

#include "diff/tape.hpp"

#include <cblas.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "errors.hpp"

namespace sluice::diff {

namespace {

// Per-thread free list of tape buffers. A fresh tape reuses the capacity of a
// retired one, so steady-state training does not touch new pages.
template <class T>
std::vector<std::vector<T>>& buffer_pool() {
  thread_local std::vector<std::vector<T>> pool;
  return pool;
}

template <class T>
void take_buffer(std::vector<T>& v) {
  auto& pool = buffer_pool<T>();
  if (pool.empty()) return;
  v.swap(pool.back());
  pool.pop_back();
}

template <class T>
void return_buffer(std::vector<T>& v) {
  constexpr std::size_t kPoolLimit = 8;
  auto& pool = buffer_pool<T>();
  if (pool.size() >= kPoolLimit) return;
  v.clear();
  pool.push_back(std::move(v));
}

// Row-major BLAS wrappers. Leading dimensions are clamped to 1 so empty
// operands stay valid arguments.
blasint bl(std::size_t n) { return static_cast<blasint>(n); }
blasint ld(std::size_t n) { return static_cast<blasint>(std::max<std::size_t>(n, 1)); }

// C = alpha * op(A) * op(B) + beta * C, with op(A) m x k and op(B) k x n.
void gemm(bool trans_a, bool trans_b, std::size_t m, std::size_t n,
          std::size_t k, double alpha, const double* a, const double* b,
          double beta, double* c) {
  cblas_dgemm(CblasRowMajor, trans_a ? CblasTrans : CblasNoTrans,
              trans_b ? CblasTrans : CblasNoTrans, bl(m), bl(n), bl(k), alpha,
              a, ld(trans_a ? m : k), b, ld(trans_b ? k : n), beta, c, ld(n));
}

Tape& tape_of(Var a) {
  if (a.tape == nullptr) throw ContractError("operation on a detached Var");
  return *a.tape;
}

Tape& common_tape(Var a, Var b) {
  if (a.tape != b.tape) throw ContractError("operands live on different tapes");
  return tape_of(a);
}

void require_same_shape(const char* what, const Shape& a, const Shape& b) {
  if (!(a == b)) {
    throw DimensionError(std::string(what) + ": shape mismatch " + a.str() +
                         " vs " + b.str());
  }
}

double dot(const double* x, const double* y, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < n; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

std::string_view op_name(Op op) {
  switch (op) {
    case Op::kConstant: return "constant";
    case Op::kParam: return "param";
    case Op::kAdd: return "add";
    case Op::kSub: return "sub";
    case Op::kMul: return "mul";
    case Op::kTanh: return "tanh";
    case Op::kSigmoid: return "sigmoid";
    case Op::kMatMul: return "matmul";
    case Op::kConcat: return "concat";
    case Op::kSlice: return "slice";
    case Op::kGather: return "gather";
    case Op::kGatherRows: return "gather_rows";
    case Op::kTranspose: return "transpose";
    case Op::kReshape: return "reshape";
    case Op::kSum: return "sum";
    case Op::kScale: return "scale";
    case Op::kScaleConst: return "scale_const";
    case Op::kFrobeniusSq: return "frobenius_sq";
    case Op::kCrossFrobeniusSq: return "cross_frobenius_sq";
    case Op::kSoftmaxXent: return "softmax_cross_entropy";
  }
  return "?";
}

Tape::Tape() {
  take_buffer(nodes_);
  take_buffer(values_);
  take_buffer(grads_);
  take_buffer(ids_);
  take_buffer(cache_);
}

Tape::~Tape() {
  return_buffer(nodes_);
  return_buffer(values_);
  return_buffer(grads_);
  return_buffer(ids_);
  return_buffer(cache_);
}

Var Tape::record(Node node) {
  if (consumed_) throw ContractError("recording onto a consumed tape");
  node.offset = values_.size();
  values_.resize(values_.size() + node.shape.size(), 0.0);
  nodes_.push_back(node);
  return Var{this, static_cast<std::uint32_t>(nodes_.size() - 1)};
}

std::uint32_t Tape::push_list(std::span<const std::uint32_t> ids) {
  const auto off = static_cast<std::uint32_t>(ids_.size());
  ids_.insert(ids_.end(), ids.begin(), ids.end());
  return off;
}

std::size_t Tape::push_cache(std::span<const double> values) {
  const std::size_t off = cache_.size();
  cache_.insert(cache_.end(), values.begin(), values.end());
  return off;
}

void Tape::check_finite(Var v) const {
  const Node& n = nodes_[v.id];
  const double* p = data(v.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) {
    if (!std::isfinite(p[i])) {
      throw NumericError("non-finite value produced by " +
                         std::string(op_name(n.op)) + " at tape node " +
                         std::to_string(v.id));
    }
  }
}

Var Tape::constant(const Tensor& t) {
  return constant(t.shape(), t.values());
}

Var Tape::constant(Shape shape, std::span<const double> values) {
  if (shape.size() != values.size()) {
    throw DimensionError("constant of shape " + shape.str() +
                         " given wrong number of values");
  }
  Node n;
  n.op = Op::kConstant;
  n.shape = shape;
  Var v = record(n);
  std::copy(values.begin(), values.end(), data(v.id));
  return v;
}

Var Tape::param(Parameter& p) {
  if (auto it = params_.find(&p); it != params_.end()) {
    return Var{this, it->second};
  }
  Node n;
  n.op = Op::kParam;
  n.shape = p.shape();
  n.param = &p;
  Var v = record(n);
  auto src = p.value().values();
  std::copy(src.begin(), src.end(), data(v.id));
  params_.emplace(&p, v.id);
  return v;
}

std::span<const double> Tape::values(Var v) const {
  return {data(v.id), nodes_[v.id].shape.size()};
}

Tensor Tape::value(Var v) const {
  auto s = values(v);
  return Tensor(nodes_[v.id].shape, std::vector<double>(s.begin(), s.end()));
}

double Tape::scalar(Var v) const {
  if (nodes_[v.id].shape.size() != 1) {
    throw DimensionError("scalar() on tensor of shape " +
                         nodes_[v.id].shape.str());
  }
  return *data(v.id);
}

std::vector<std::uint32_t> Tape::inputs(Var v) const {
  const Node& n = nodes_[v.id];
  std::vector<std::uint32_t> out;
  if (n.op == Op::kConcat) {
    out.assign(list(n), list(n) + n.list_size);
    return out;
  }
  if (n.a != kNone) out.push_back(n.a);
  if (n.b != kNone) out.push_back(n.b);
  return out;
}

std::span<const double> Tape::grad(Var v) const {
  if (!consumed_) throw ContractError("grad() requested before backward()");
  return {grads_.data() + nodes_[v.id].offset, nodes_[v.id].shape.size()};
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw ContractError("loss does not belong to tape");
  if (consumed_) {
    throw ContractError("backward() called twice on the same tape");
  }
  if (nodes_[loss.id].shape.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        nodes_[loss.id].shape.str());
  }
  consumed_ = true;
  grads_.assign(values_.size(), 0.0);
  grads_[nodes_[loss.id].offset] = 1.0;
  for (std::uint32_t id = loss.id + 1; id-- > 0;) backprop_node(id);
  for (const auto& [p, id] : params_) {
    const Node& n = nodes_[id];
    n.param->accumulate_grad(
        std::span<const double>(grads_.data() + n.offset, n.shape.size()));
  }
}

void Tape::backprop_node(std::uint32_t id) {
  const Node& n = nodes_[id];
  const std::size_t len = n.shape.size();
  const double* g = grads_.data() + n.offset;
  const double* y = values_.data() + n.offset;
  auto ga = [&]() { return grads_.data() + nodes_[n.a].offset; };
  auto gb = [&]() { return grads_.data() + nodes_[n.b].offset; };
  auto va = [&]() { return values_.data() + nodes_[n.a].offset; };
  auto vb = [&]() { return values_.data() + nodes_[n.b].offset; };

  switch (n.op) {
    case Op::kConstant:
    case Op::kParam:
      return;
    case Op::kAdd: {
      double* da = ga();
      double* db = gb();
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i];
      for (std::size_t i = 0; i < len; ++i) db[i] += g[i];
      return;
    }
    case Op::kSub: {
      double* da = ga();
      double* db = gb();
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i];
      for (std::size_t i = 0; i < len; ++i) db[i] -= g[i];
      return;
    }
    case Op::kMul: {
      double* da = ga();
      double* db = gb();
      const double* a = va();
      const double* b = vb();
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i] * b[i];
      for (std::size_t i = 0; i < len; ++i) db[i] += g[i] * a[i];
      return;
    }
    case Op::kTanh: {
      double* da = ga();
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i] * (1.0 - y[i] * y[i]);
      return;
    }
    case Op::kSigmoid: {
      double* da = ga();
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i] * y[i] * (1.0 - y[i]);
      return;
    }
    case Op::kMatMul: {
      const Shape& sa = nodes_[n.a].shape;
      const std::size_t rows = sa.rows, inner = sa.cols;
      const std::size_t cols = nodes_[n.b].shape.cols;
      const double* a = va();
      const double* b = vb();
      double* da = ga();
      double* db = gb();
      // dA = dC * B^T ; dB = A^T * dC
      if (cols == 1) {
        cblas_dger(CblasRowMajor, bl(rows), bl(inner), 1.0, g, 1, b, 1, da,
                   ld(inner));
        cblas_dgemv(CblasRowMajor, CblasTrans, bl(rows), bl(inner), 1.0, a,
                    ld(inner), g, 1, 1.0, db, 1);
        return;
      }
      gemm(false, true, rows, inner, cols, 1.0, g, b, 1.0, da);
      gemm(true, false, inner, cols, rows, 1.0, a, g, 1.0, db);
      return;
    }
    case Op::kConcat: {
      const std::uint32_t* parts = list(n);
      if (n.aux == 1) {
        const std::size_t rows = n.shape.rows, total = n.shape.cols;
        std::size_t col0 = 0;
        for (std::uint32_t k = 0; k < n.list_size; ++k) {
          const Node& in = nodes_[parts[k]];
          double* d = grads_.data() + in.offset;
          const std::size_t c = in.shape.cols;
          for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t j = 0; j < c; ++j) {
              d[r * c + j] += g[r * total + col0 + j];
            }
          }
          col0 += c;
        }
      } else {
        std::size_t off = 0;
        for (std::uint32_t k = 0; k < n.list_size; ++k) {
          const Node& in = nodes_[parts[k]];
          double* d = grads_.data() + in.offset;
          const std::size_t m = in.shape.size();
          for (std::size_t i = 0; i < m; ++i) d[i] += g[off + i];
          off += m;
        }
      }
      return;
    }
    case Op::kSlice: {
      double* da = ga() + n.aux;
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i];
      return;
    }
    case Op::kGather: {
      double* da = ga();
      const std::uint32_t* idx = list(n);
      for (std::size_t i = 0; i < len; ++i) da[idx[i]] += g[i];
      return;
    }
    case Op::kGatherRows: {
      double* da = ga();
      const std::uint32_t* idx = list(n);
      const std::size_t c = n.shape.cols;
      for (std::size_t i = 0; i < n.list_size; ++i) {
        double* d = da + idx[i] * c;
        const double* gi = g + i * c;
        for (std::size_t j = 0; j < c; ++j) d[j] += gi[j];
      }
      return;
    }
    case Op::kTranspose: {
      double* da = ga();
      const std::size_t r = n.shape.rows, c = n.shape.cols;
      for (std::size_t i = 0; i < r; ++i) {
        for (std::size_t j = 0; j < c; ++j) da[j * r + i] += g[i * c + j];
      }
      return;
    }
    case Op::kReshape: {
      double* da = ga();
      for (std::size_t i = 0; i < len; ++i) da[i] += g[i];
      return;
    }
    case Op::kSum: {
      double* da = ga();
      const std::size_t m = nodes_[n.a].shape.size();
      for (std::size_t i = 0; i < m; ++i) da[i] += g[0];
      return;
    }
    case Op::kScale: {
      double* da = ga();
      const double s = *vb();
      const double* a = va();
      double acc = 0.0;
      for (std::size_t i = 0; i < len; ++i) {
        da[i] += s * g[i];
        acc += a[i] * g[i];
      }
      *gb() += acc;
      return;
    }
    case Op::kScaleConst: {
      double* da = ga();
      for (std::size_t i = 0; i < len; ++i) da[i] += n.scalar * g[i];
      return;
    }
    case Op::kFrobeniusSq: {
      double* da = ga();
      const double* a = va();
      const std::size_t m = nodes_[n.a].shape.size();
      for (std::size_t i = 0; i < m; ++i) da[i] += 2.0 * a[i] * g[0];
      return;
    }
    case Op::kCrossFrobeniusSq: {
      // P = A B^T is cached; dA = 2g P B, dB = 2g P^T A.
      const Shape& sa = nodes_[n.a].shape;
      const std::size_t ra = sa.rows, inner = sa.cols;
      const std::size_t rb = nodes_[n.b].shape.rows;
      const double* p = cache(n.aux);
      const double* a = va();
      const double* b = vb();
      double* da = ga();
      double* db = gb();
      const double two_g = 2.0 * g[0];
      // Sequential calls, so da and db may share storage when a == b.
      gemm(false, false, ra, inner, rb, two_g, p, b, 1.0, da);
      gemm(true, false, rb, inner, ra, two_g, p, a, 1.0, db);
      return;
    }
    case Op::kSoftmaxXent: {
      double* da = ga();
      const double* probs = cache(n.aux);
      const std::size_t classes = nodes_[n.a].shape.size();
      const auto gold = static_cast<std::size_t>(n.scalar);
      for (std::size_t i = 0; i < classes; ++i) {
        da[i] += g[0] * (probs[i] - (i == gold ? 1.0 : 0.0));
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// ops

namespace {

Var unary(Op op, Var a) {
  Tape& t = tape_of(a);
  Tape::Node n;
  n.op = op;
  n.shape = t.shape(a);
  n.a = a.id;
  Var out = t.record(n);
  const double* x = t.data(a.id);
  double* y = t.data(out.id);
  const std::size_t len = n.shape.size();
  if (op == Op::kTanh) {
    for (std::size_t i = 0; i < len; ++i) y[i] = std::tanh(x[i]);
  } else {
    for (std::size_t i = 0; i < len; ++i) y[i] = stable_sigmoid(x[i]);
  }
  return out;
}

Var binary(Op op, Var a, Var b) {
  Tape& t = common_tape(a, b);
  require_same_shape(std::string(op_name(op)).c_str(), t.shape(a), t.shape(b));
  Tape::Node n;
  n.op = op;
  n.shape = t.shape(a);
  n.a = a.id;
  n.b = b.id;
  Var out = t.record(n);
  const double* x = t.data(a.id);
  const double* z = t.data(b.id);
  double* y = t.data(out.id);
  const std::size_t len = n.shape.size();
  switch (op) {
    case Op::kAdd:
      for (std::size_t i = 0; i < len; ++i) y[i] = x[i] + z[i];
      break;
    case Op::kSub:
      for (std::size_t i = 0; i < len; ++i) y[i] = x[i] - z[i];
      break;
    default:
      for (std::size_t i = 0; i < len; ++i) y[i] = x[i] * z[i];
      break;
  }
  t.check_finite(out);
  return out;
}

}  // namespace

Var add(Var a, Var b) { return binary(Op::kAdd, a, b); }
Var sub(Var a, Var b) { return binary(Op::kSub, a, b); }
Var mul(Var a, Var b) { return binary(Op::kMul, a, b); }
Var tanh(Var a) { return unary(Op::kTanh, a); }
Var sigmoid(Var a) { return unary(Op::kSigmoid, a); }

Var elementwise(Elementwise kind, std::span<const Var> args) {
  const bool is_binary = kind == Elementwise::kAdd || kind == Elementwise::kMul;
  if (args.size() != (is_binary ? 2u : 1u)) {
    throw DimensionError("elementwise: wrong operand count " +
                         std::to_string(args.size()));
  }
  switch (kind) {
    case Elementwise::kAdd: return add(args[0], args[1]);
    case Elementwise::kMul: return mul(args[0], args[1]);
    case Elementwise::kTanh: return tanh(args[0]);
    case Elementwise::kSigmoid: return sigmoid(args[0]);
  }
  throw ContractError("unknown elementwise op");
}

Var matmul(Var a, Var b) {
  Tape& t = common_tape(a, b);
  const Shape sa = t.shape(a);
  const Shape sb = t.shape(b);
  if (sa.rank != 2 || sa.cols != sb.rows) {
    throw DimensionError("matmul: cannot multiply " + sa.str() + " by " +
                         sb.str());
  }
  Tape::Node n;
  n.op = Op::kMatMul;
  n.shape = sb.rank == 1 ? Shape::vec(sa.rows) : Shape::mat(sa.rows, sb.cols);
  n.a = a.id;
  n.b = b.id;
  Var out = t.record(n);
  const double* x = t.data(a.id);
  const double* z = t.data(b.id);
  double* y = t.data(out.id);
  const std::size_t rows = sa.rows, inner = sa.cols, cols = sb.cols;
  if (cols == 1) {
    cblas_dgemv(CblasRowMajor, CblasNoTrans, bl(rows), bl(inner), 1.0, x,
                ld(inner), z, 1, 0.0, y, 1);
  } else {
    gemm(false, false, rows, cols, inner, 1.0, x, z, 0.0, y);
  }
  t.check_finite(out);
  return out;
}

Var concat(std::span<const Var> parts, int axis) {
  if (parts.empty()) throw DimensionError("concat of zero tensors");
  Tape& t = tape_of(parts[0]);
  const Shape first = t.shape(parts[0]);
  std::vector<std::uint32_t> ids;
  ids.reserve(parts.size());
  Shape out_shape = first;
  if (first.rank == 1) {
    if (axis != 0) throw DimensionError("concat: rank-1 tensors need axis 0");
    std::size_t total = 0;
    for (Var p : parts) {
      if (p.tape != &t) throw ContractError("concat across tapes");
      if (t.shape(p).rank != 1) {
        throw DimensionError("concat: mixed ranks " + first.str() + " and " +
                             t.shape(p).str());
      }
      total += t.shape(p).rows;
      ids.push_back(p.id);
    }
    out_shape = Shape::vec(total);
  } else {
    if (axis != 0 && axis != 1) throw DimensionError("concat: bad axis");
    std::size_t along = 0;
    for (Var p : parts) {
      if (p.tape != &t) throw ContractError("concat across tapes");
      const Shape s = t.shape(p);
      const bool ok = s.rank == 2 && (axis == 0 ? s.cols == first.cols
                                                : s.rows == first.rows);
      if (!ok) {
        throw DimensionError("concat: inconsistent shapes " + first.str() +
                             " and " + s.str() + " along axis " +
                             std::to_string(axis));
      }
      along += axis == 0 ? s.rows : s.cols;
      ids.push_back(p.id);
    }
    out_shape = axis == 0 ? Shape::mat(along, first.cols)
                          : Shape::mat(first.rows, along);
  }
  Tape::Node n;
  n.op = Op::kConcat;
  n.shape = out_shape;
  n.aux = static_cast<std::size_t>(axis);
  n.list_offset = t.push_list(ids);
  n.list_size = static_cast<std::uint32_t>(ids.size());
  Var out = t.record(n);
  double* y = t.data(out.id);
  if (axis == 0) {
    for (std::uint32_t id : ids) {
      const std::size_t m = t.node(id).shape.size();
      std::copy(t.data(id), t.data(id) + m, y);
      y += m;
    }
  } else {
    std::size_t col0 = 0;
    for (std::uint32_t id : ids) {
      const std::size_t c = t.node(id).shape.cols;
      const double* x = t.data(id);
      for (std::size_t r = 0; r < out_shape.rows; ++r) {
        std::copy(x + r * c, x + (r + 1) * c, y + r * out_shape.cols + col0);
      }
      col0 += c;
    }
  }
  return out;
}

Var stack(std::span<const Var> rows) {
  if (rows.empty()) throw DimensionError("stack of zero tensors");
  Tape& t = tape_of(rows[0]);
  const Shape first = t.shape(rows[0]);
  for (Var r : rows) {
    if (!(t.shape(r) == first) || first.rank != 1) {
      throw DimensionError("stack: rows must be rank-1 of equal length, got " +
                           first.str() + " and " + t.shape(r).str());
    }
  }
  Var flat = concat(rows, 0);
  t.node(flat.id).shape = Shape::mat(rows.size(), first.rows);
  return flat;
}

namespace {

Var slice_flat(Var a, std::size_t start, Shape shape) {
  Tape& t = tape_of(a);
  if (start + shape.size() > t.shape(a).size()) {
    throw DimensionError("slice [" + std::to_string(start) + ", " +
                         std::to_string(start + shape.size()) +
                         ") outside tensor of shape " + t.shape(a).str());
  }
  Tape::Node n;
  n.op = Op::kSlice;
  n.shape = shape;
  n.a = a.id;
  n.aux = start;
  Var out = t.record(n);
  const double* x = t.data(a.id) + start;
  std::copy(x, x + shape.size(), t.data(out.id));
  return out;
}

}  // namespace

Var slice(Var a, std::size_t start, std::size_t len) {
  if (tape_of(a).shape(a).rank != 1) {
    throw DimensionError("slice needs a rank-1 tensor");
  }
  return slice_flat(a, start, Shape::vec(len));
}

Var row(Var a, std::size_t i) {
  const Shape s = tape_of(a).shape(a);
  if (s.rank != 2 || i >= s.rows) {
    throw DimensionError("row " + std::to_string(i) + " of " + s.str());
  }
  return slice_flat(a, i * s.cols, Shape::vec(s.cols));
}

Var gather(Var a, std::span<const std::uint32_t> index, Shape shape) {
  Tape& t = tape_of(a);
  if (index.size() != shape.size()) {
    throw DimensionError("gather: index length does not match shape " +
                         shape.str());
  }
  const std::size_t limit = t.shape(a).size();
  for (std::uint32_t i : index) {
    if (i >= limit) throw DimensionError("gather: index out of range");
  }
  Tape::Node n;
  n.op = Op::kGather;
  n.shape = shape;
  n.a = a.id;
  n.list_offset = t.push_list(index);
  n.list_size = static_cast<std::uint32_t>(index.size());
  Var out = t.record(n);
  const double* x = t.data(a.id);
  double* y = t.data(out.id);
  for (std::size_t i = 0; i < index.size(); ++i) y[i] = x[index[i]];
  return out;
}

Var gather_rows(Var m, std::span<const std::uint32_t> rows) {
  Tape& t = tape_of(m);
  const Shape s = t.shape(m);
  if (s.rank != 2) throw DimensionError("gather_rows needs a 2-D tensor");
  if (rows.empty()) throw DimensionError("gather_rows: empty row list");
  for (std::uint32_t r : rows) {
    if (r >= s.rows) throw DimensionError("gather_rows: row out of range");
  }
  Tape::Node n;
  n.op = Op::kGatherRows;
  n.shape = Shape::mat(rows.size(), s.cols);
  n.a = m.id;
  n.list_offset = t.push_list(rows);
  n.list_size = static_cast<std::uint32_t>(rows.size());
  Var out = t.record(n);
  const double* x = t.data(m.id);
  double* y = t.data(out.id);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::copy_n(x + rows[i] * s.cols, s.cols, y + i * s.cols);
  }
  return out;
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  const Shape s = t.shape(a);
  if (s.rank != 2) throw DimensionError("transpose needs a 2-D tensor");
  Tape::Node n;
  n.op = Op::kTranspose;
  n.shape = Shape::mat(s.cols, s.rows);
  n.a = a.id;
  Var out = t.record(n);
  const double* x = t.data(a.id);
  double* y = t.data(out.id);
  for (std::size_t i = 0; i < s.rows; ++i) {
    for (std::size_t j = 0; j < s.cols; ++j) y[j * s.rows + i] = x[i * s.cols + j];
  }
  return out;
}

Var reshape(Var a, Shape shape) {
  Tape& t = tape_of(a);
  if (shape.size() != t.shape(a).size()) {
    throw DimensionError("reshape " + t.shape(a).str() + " to " + shape.str());
  }
  Tape::Node n;
  n.op = Op::kReshape;
  n.shape = shape;
  n.a = a.id;
  Var out = t.record(n);
  std::copy(t.data(a.id), t.data(a.id) + shape.size(), t.data(out.id));
  return out;
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  Tape::Node n;
  n.op = Op::kSum;
  n.shape = Shape::scalar();
  n.a = a.id;
  Var out = t.record(n);
  const double* x = t.data(a.id);
  double s = 0.0;
  for (std::size_t i = 0; i < t.shape(a).size(); ++i) s += x[i];
  *t.data(out.id) = s;
  t.check_finite(out);
  return out;
}

Var scale(Var a, Var s) {
  Tape& t = common_tape(a, s);
  if (t.shape(s).size() != 1) {
    throw DimensionError("scale: factor must be a single value, got " +
                         t.shape(s).str());
  }
  Tape::Node n;
  n.op = Op::kScale;
  n.shape = t.shape(a);
  n.a = a.id;
  n.b = s.id;
  Var out = t.record(n);
  const double f = *t.data(s.id);
  const double* x = t.data(a.id);
  double* y = t.data(out.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) y[i] = f * x[i];
  t.check_finite(out);
  return out;
}

Var scale(Var a, double c) {
  Tape& t = tape_of(a);
  Tape::Node n;
  n.op = Op::kScaleConst;
  n.shape = t.shape(a);
  n.a = a.id;
  n.scalar = c;
  Var out = t.record(n);
  const double* x = t.data(a.id);
  double* y = t.data(out.id);
  for (std::size_t i = 0; i < n.shape.size(); ++i) y[i] = c * x[i];
  t.check_finite(out);
  return out;
}

Var frobenius_sq(Var m) {
  Tape& t = tape_of(m);
  if (t.shape(m).rank != 2) {
    throw DimensionError("frobenius_sq needs a 2-D tensor, got " +
                         t.shape(m).str());
  }
  Tape::Node n;
  n.op = Op::kFrobeniusSq;
  n.shape = Shape::scalar();
  n.a = m.id;
  Var out = t.record(n);
  const double* x = t.data(m.id);
  *t.data(out.id) = dot(x, x, t.shape(m).size());
  t.check_finite(out);
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> p(logits.size());
  if (logits.empty()) return p;
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (double& v : p) v /= z;
  return p;
}

Var cross_frobenius_sq(Var a, Var b) {
  Tape& t = common_tape(a, b);
  const Shape sa = t.shape(a), sb = t.shape(b);
  if (sa.rank != 2 || sb.rank != 2 || sa.cols != sb.cols) {
    throw DimensionError("cross_frobenius_sq: incompatible shapes " + sa.str() +
                         " and " + sb.str());
  }
  std::vector<double> prod(sa.rows * sb.rows);
  const double* x = t.data(a.id);
  const double* z = t.data(b.id);
  gemm(false, true, sa.rows, sb.rows, sa.cols, 1.0, x, z, 0.0, prod.data());
  const double total = dot(prod.data(), prod.data(), prod.size());
  Tape::Node n;
  n.op = Op::kCrossFrobeniusSq;
  n.shape = Shape::scalar();
  n.a = a.id;
  n.b = b.id;
  n.aux = t.push_cache(prod);
  Var out = t.record(n);
  *t.data(out.id) = total;
  t.check_finite(out);
  return out;
}

Var softmax_cross_entropy(Var logits, std::size_t gold) {
  Tape& t = tape_of(logits);
  const Shape s = t.shape(logits);
  if (s.rank != 1 || s.rows < 2) {
    throw DimensionError("softmax_cross_entropy needs a rank-1 tensor of at "
                         "least 2 classes, got " + s.str());
  }
  if (gold >= s.rows) {
    throw LabelError("gold label " + std::to_string(gold) +
                     " out of range for " + std::to_string(s.rows) +
                     " classes");
  }
  std::span<const double> x(t.data(logits.id), s.rows);
  const double mx = *std::max_element(x.begin(), x.end());
  double z = 0.0;
  for (double v : x) z += std::exp(v - mx);
  const double log_z = mx + std::log(z);
  std::vector<double> probs(s.rows);
  for (std::size_t i = 0; i < s.rows; ++i) probs[i] = std::exp(x[i] - log_z);

  Tape::Node n;
  n.op = Op::kSoftmaxXent;
  n.shape = Shape::scalar();
  n.a = logits.id;
  n.scalar = static_cast<double>(gold);
  n.aux = t.push_cache(probs);
  Var out = t.record(n);
  *t.data(out.id) = log_z - t.data(logits.id)[gold];
  t.check_finite(out);
  return out;
}

}  // namespace sluice::diff
