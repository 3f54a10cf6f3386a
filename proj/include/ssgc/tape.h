// Copyright 2026 The SSGC Authors.
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

#ifndef SSGC_TAPE_H_
#define SSGC_TAPE_H_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ssgc/tensor.h"

namespace ssgc {

class ParamStore;

// Handle to a value recorded on a Tape.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

// Gradients by parameter name.
class Gradients {
 public:
  bool contains(const std::string &name) const { return grads_.count(name) > 0; }
  const Tensor &at(const std::string &name) const { return grads_.at(name); }
  Tensor &operator[](const std::string &name) { return grads_[name]; }
  const std::map<std::string, Tensor> &all() const { return grads_; }
  // Adds `other` elementwise (entries missing on either side are kept).
  void Accumulate(const Gradients &other);
  void Scale(double factor);
  bool empty() const { return grads_.empty(); }

 private:
  std::map<std::string, Tensor> grads_;
};

// Reverse-mode recorder for a fixed set of dense operations. Values are
// computed eagerly; Backward() walks the records in reverse creation order.
//
// Broadcasting: Add/Sub/Mul accept a right operand of the same shape, a
// single row (broadcast over rows) or a 1x1 scalar.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;

  Var Constant(Tensor value);
  // Leaf bound to a stored parameter; repeated calls return the same Var.
  Var Param(const ParamStore &store, const std::string &name);

  Var MatMul(Var a, Var b);
  // Constant sparse left operand.
  Var SparseMatMul(const SparseMatrix &a, Var b);
  Var Add(Var a, Var b);
  Var Sub(Var a, Var b);
  Var Mul(Var a, Var b);
  Var Scale(Var a, double factor);
  Var Transpose(Var a);

  Var Sigmoid(Var a);
  Var Tanh(Var a);
  Var Relu(Var a);
  Var Log(Var a);
  Var Exp(Var a);
  // log(sigmoid(x)) computed without overflow.
  Var LogSigmoid(Var a);
  Var SoftmaxRows(Var a);
  Var LogSoftmaxRows(Var a);

  Var Sum(Var a);
  Var Mean(Var a);
  // Column-wise mean / max over rows, giving one row.
  Var MeanRows(Var a);
  Var MaxRows(Var a);

  Var ConcatCols(const std::vector<Var> &parts);
  Var ConcatRows(const std::vector<Var> &parts);
  Var GatherRows(Var a, const std::vector<int> &rows);
  Var SliceRows(Var a, int begin, int count);
  Var SliceCols(Var a, int begin, int count);
  Var Pick(Var a, int row, int col);

  const Tensor &value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }
  size_t size() const { return nodes_.size(); }

  // `loss` must be 1x1; call once per tape. Every parameter leaf on the tape gets an entry; those
  // not reachable from `loss` are zero.
  Gradients Backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::string param;  // non-empty for parameter leaves
    std::function<void(Tape &, Node &)> backward;
  };

  Var Push(Tensor value, bool requires_grad, std::function<void(Tape &, Node &)> backward);
  Tensor &GradOf(int id);
  Node &node(Var v) { return nodes_.at(v.id); }
  Var Elementwise(Var a, double (*f)(double), double (*df)(double, double));
  Var Broadcast(Var a, Var b, int op);

  std::vector<Node> nodes_;
  std::map<std::string, int> params_;
};

}  // namespace ssgc

#endif  // SSGC_TAPE_H_
