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

#include "ssgc/tape.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "ssgc/error.h"
#include "ssgc/optim.h"

namespace ssgc {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapC = Eigen::Map<const RowMat>;
using Map = Eigen::Map<RowMat>;

MapC View(const Tensor &t) { return MapC(t.data.data(), t.rows(), t.cols()); }
Map View(Tensor &t) { return Map(t.data.data(), t.rows(), t.cols()); }

void Require(bool ok, const std::string &what) {
  if (!ok) throw ShapeError(what);
}

double SigmoidValue(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

void Gradients::Accumulate(const Gradients &other) {
  for (const auto &[name, g] : other.grads_) {
    auto it = grads_.find(name);
    if (it == grads_.end()) {
      grads_.emplace(name, g);
      continue;
    }
    Require(it->second.same_shape(g), "gradient shape mismatch for " + name);
    for (size_t i = 0; i < g.data.size(); ++i) it->second.data[i] += g.data[i];
  }
}

void Gradients::Scale(double factor) {
  for (auto &[name, g] : grads_) {
    for (double &v : g.data) v *= factor;
  }
}

Var Tape::Push(Tensor value, bool requires_grad, std::function<void(Tape &, Node &)> backward) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  if (requires_grad) n.backward = std::move(backward);
  nodes_.push_back(std::move(n));
  return Var{static_cast<int>(nodes_.size()) - 1};
}

Tensor &Tape::GradOf(int id) {
  Node &n = nodes_[id];
  if (n.grad.data.empty()) n.grad = Tensor::ZerosLike(n.value);
  return n.grad;
}

Var Tape::Constant(Tensor value) {
  if (value.rank() < 2) value.shape = {value.rows(), value.cols()};
  return Push(std::move(value), false, nullptr);
}

Var Tape::Param(const ParamStore &store, const std::string &name) {
  auto it = params_.find(name);
  if (it != params_.end()) return Var{it->second};
  Tensor value = store.get(name);
  if (value.rank() < 2) value.shape = {value.rows(), value.cols()};
  Var v = Push(std::move(value), true, [](Tape &, Node &) {});
  nodes_[v.id].param = name;
  params_[name] = v.id;
  return v;
}

Var Tape::MatMul(Var a, Var b) {
  const Tensor &A = value(a);
  const Tensor &B = value(b);
  Require(A.cols() == B.rows(), "matmul " + ShapeString(A) + " x " + ShapeString(B));
  Tensor out = Tensor::Zeros(A.rows(), B.cols());
  View(out).noalias() = View(A) * View(B);
  const bool rg = requires_grad(a) || requires_grad(b);
  return Push(std::move(out), rg, [a, b](Tape &t, Node &n) {
    auto G = View(n.grad);
    if (t.requires_grad(a)) View(t.GradOf(a.id)).noalias() += G * View(t.value(b)).transpose();
    if (t.requires_grad(b)) View(t.GradOf(b.id)).noalias() += View(t.value(a)).transpose() * G;
  });
}

Var Tape::SparseMatMul(const SparseMatrix &a, Var b) {
  const Tensor &B = value(b);
  Require(a.cols == B.rows(), "sparse matmul " + std::to_string(a.rows) + "x" +
                                  std::to_string(a.cols) + " x " + ShapeString(B));
  const int c = B.cols();
  Tensor out = Tensor::Zeros(a.rows, c);
  for (int r = 0; r < a.rows; ++r) {
    double *dst = out.data.data() + static_cast<size_t>(r) * c;
    for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const double v = a.val[k];
      const double *src = B.data.data() + static_cast<size_t>(a.col[k]) * c;
      for (int j = 0; j < c; ++j) dst[j] += v * src[j];
    }
  }
  // The operator is copied into the closure; callers may pass temporaries.
  return Push(std::move(out), requires_grad(b), [a, b](Tape &t, Node &n) {
    Tensor &gb = t.GradOf(b.id);
    const int c = n.grad.cols();
    for (int r = 0; r < a.rows; ++r) {
      const double *g = n.grad.data.data() + static_cast<size_t>(r) * c;
      for (int k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
        const double v = a.val[k];
        double *dst = gb.data.data() + static_cast<size_t>(a.col[k]) * c;
        for (int j = 0; j < c; ++j) dst[j] += v * g[j];
      }
    }
  });
}

// op: 0 add, 1 sub, 2 mul.
Var Tape::Broadcast(Var a, Var b, int op) {
  const Tensor &A = value(a);
  const Tensor &B = value(b);
  const int r = A.rows(), c = A.cols();
  int mode;  // 0 same shape, 1 row broadcast, 2 scalar broadcast
  if (B.rows() == r && B.cols() == c) {
    mode = 0;
  } else if (B.rows() == 1 && B.cols() == c) {
    mode = 1;
  } else if (B.rows() == 1 && B.cols() == 1) {
    mode = 2;
  } else {
    throw ShapeError("broadcast " + ShapeString(A) + " with " + ShapeString(B));
  }
  auto bidx = [mode, c](int i, int j) { return mode == 0 ? i * c + j : mode == 1 ? j : 0; };
  Tensor out = Tensor::Zeros(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) {
      const double x = A.data[i * c + j], y = B.data[bidx(i, j)];
      out.data[i * c + j] = op == 0 ? x + y : op == 1 ? x - y : x * y;
    }
  }
  const bool rg = requires_grad(a) || requires_grad(b);
  return Push(std::move(out), rg, [a, b, op, r, c, bidx](Tape &t, Node &n) {
    const Tensor &G = n.grad;
    if (t.requires_grad(a)) {
      Tensor &ga = t.GradOf(a.id);
      const Tensor &B = t.value(b);
      for (int i = 0; i < r * c; ++i) {
        ga.data[i] += op == 2 ? G.data[i] * B.data[bidx(i / c, i % c)] : G.data[i];
      }
    }
    if (t.requires_grad(b)) {
      Tensor &gb = t.GradOf(b.id);
      const Tensor &A = t.value(a);
      for (int i = 0; i < r * c; ++i) {
        double g = op == 1 ? -G.data[i] : op == 2 ? G.data[i] * A.data[i] : G.data[i];
        gb.data[bidx(i / c, i % c)] += g;
      }
    }
  });
}

Var Tape::Add(Var a, Var b) { return Broadcast(a, b, 0); }
Var Tape::Sub(Var a, Var b) { return Broadcast(a, b, 1); }
Var Tape::Mul(Var a, Var b) { return Broadcast(a, b, 2); }

Var Tape::Scale(Var a, double factor) {
  Tensor out = value(a);
  for (double &v : out.data) v *= factor;
  return Push(std::move(out), requires_grad(a), [a, factor](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    for (size_t i = 0; i < g.data.size(); ++i) g.data[i] += factor * n.grad.data[i];
  });
}

Var Tape::Transpose(Var a) {
  const Tensor &A = value(a);
  Tensor out = Tensor::Zeros(A.cols(), A.rows());
  View(out) = View(A).transpose();
  return Push(std::move(out), requires_grad(a), [a](Tape &t, Node &n) {
    View(t.GradOf(a.id)) += View(n.grad).transpose();
  });
}

Var Tape::Elementwise(Var a, double (*f)(double), double (*df)(double, double)) {
  Tensor out = value(a);
  for (double &v : out.data) v = f(v);
  return Push(std::move(out), requires_grad(a), [a, df](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    const Tensor &x = t.value(a);
    for (size_t i = 0; i < g.data.size(); ++i) {
      g.data[i] += n.grad.data[i] * df(x.data[i], n.value.data[i]);
    }
  });
}

Var Tape::Sigmoid(Var a) {
  return Elementwise(a, SigmoidValue, [](double, double y) { return y * (1.0 - y); });
}

Var Tape::Tanh(Var a) {
  return Elementwise(
      a, [](double x) { return std::tanh(x); }, [](double, double y) { return 1.0 - y * y; });
}

Var Tape::Relu(Var a) {
  return Elementwise(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var Tape::Log(Var a) {
  return Elementwise(
      a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Var Tape::Exp(Var a) {
  return Elementwise(
      a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
}

Var Tape::LogSigmoid(Var a) {
  return Elementwise(
      a,
      [](double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); },
      [](double x, double) { return 1.0 - SigmoidValue(x); });
}

Var Tape::SoftmaxRows(Var a) {
  Tensor out = value(a);
  const int r = out.rows(), c = out.cols();
  for (int i = 0; i < r; ++i) {
    double *row = &out.data[i * c];
    double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += (row[j] = std::exp(row[j] - m));
    for (int j = 0; j < c; ++j) row[j] /= z;
  }
  return Push(std::move(out), requires_grad(a), [a, r, c](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    for (int i = 0; i < r; ++i) {
      const double *y = &n.value.data[i * c];
      const double *gy = &n.grad.data[i * c];
      double dot = 0.0;
      for (int j = 0; j < c; ++j) dot += y[j] * gy[j];
      for (int j = 0; j < c; ++j) g.data[i * c + j] += y[j] * (gy[j] - dot);
    }
  });
}

Var Tape::LogSoftmaxRows(Var a) {
  Tensor out = value(a);
  const int r = out.rows(), c = out.cols();
  for (int i = 0; i < r; ++i) {
    double *row = &out.data[i * c];
    double m = *std::max_element(row, row + c);
    double z = 0.0;
    for (int j = 0; j < c; ++j) z += std::exp(row[j] - m);
    const double lz = m + std::log(z);
    for (int j = 0; j < c; ++j) row[j] -= lz;
  }
  return Push(std::move(out), requires_grad(a), [a, r, c](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    for (int i = 0; i < r; ++i) {
      const double *y = &n.value.data[i * c];
      const double *gy = &n.grad.data[i * c];
      double total = 0.0;
      for (int j = 0; j < c; ++j) total += gy[j];
      for (int j = 0; j < c; ++j) g.data[i * c + j] += gy[j] - std::exp(y[j]) * total;
    }
  });
}

Var Tape::Sum(Var a) {
  double s = 0.0;
  for (double v : value(a).data) s += v;
  return Push(Tensor::Filled(1, 1, s), requires_grad(a), [a](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    for (double &v : g.data) v += n.grad.data[0];
  });
}

Var Tape::Mean(Var a) {
  const double count = static_cast<double>(value(a).size());
  Require(count > 0, "mean of empty tensor");
  return Scale(Sum(a), 1.0 / count);
}

Var Tape::MeanRows(Var a) {
  const Tensor &A = value(a);
  const int r = A.rows(), c = A.cols();
  Require(r > 0, "mean over zero rows");
  Tensor out = Tensor::Zeros(1, c);
  View(out) = View(A).colwise().sum() / static_cast<double>(r);
  return Push(std::move(out), requires_grad(a), [a, r](Tape &t, Node &n) {
    View(t.GradOf(a.id)).rowwise() += (View(n.grad) / static_cast<double>(r)).row(0);
  });
}

Var Tape::MaxRows(Var a) {
  const Tensor &A = value(a);
  const int r = A.rows(), c = A.cols();
  Require(r > 0, "max over zero rows");
  Tensor out = Tensor::Zeros(1, c);
  std::vector<int> arg(c, 0);
  for (int j = 0; j < c; ++j) {
    double best = A.data[j];
    for (int i = 1; i < r; ++i) {
      if (A.data[i * c + j] > best) {
        best = A.data[i * c + j];
        arg[j] = i;
      }
    }
    out.data[j] = best;
  }
  return Push(std::move(out), requires_grad(a), [a, arg, c](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    for (int j = 0; j < c; ++j) g.data[arg[j] * c + j] += n.grad.data[j];
  });
}

Var Tape::ConcatCols(const std::vector<Var> &parts) {
  Require(!parts.empty(), "concat of nothing");
  const int r = value(parts[0]).rows();
  int c = 0;
  bool rg = false;
  for (Var p : parts) {
    Require(value(p).rows() == r, "concat_cols row mismatch");
    c += value(p).cols();
    rg |= requires_grad(p);
  }
  Tensor out = Tensor::Zeros(r, c);
  int offset = 0;
  for (Var p : parts) {
    const int pc = value(p).cols();
    View(out).middleCols(offset, pc) = View(value(p));
    offset += pc;
  }
  return Push(std::move(out), rg, [parts](Tape &t, Node &n) {
    int offset = 0;
    for (Var p : parts) {
      const int pc = t.value(p).cols();
      if (t.requires_grad(p)) View(t.GradOf(p.id)) += View(n.grad).middleCols(offset, pc);
      offset += pc;
    }
  });
}

Var Tape::ConcatRows(const std::vector<Var> &parts) {
  Require(!parts.empty(), "concat of nothing");
  const int c = value(parts[0]).cols();
  int r = 0;
  bool rg = false;
  for (Var p : parts) {
    Require(value(p).cols() == c, "concat_rows column mismatch");
    r += value(p).rows();
    rg |= requires_grad(p);
  }
  Tensor out = Tensor::Zeros(r, c);
  size_t offset = 0;
  for (Var p : parts) {
    const auto &d = value(p).data;
    std::copy(d.begin(), d.end(), out.data.begin() + offset);
    offset += d.size();
  }
  return Push(std::move(out), rg, [parts](Tape &t, Node &n) {
    size_t offset = 0;
    for (Var p : parts) {
      const size_t len = t.value(p).size();
      if (t.requires_grad(p)) {
        Tensor &g = t.GradOf(p.id);
        for (size_t i = 0; i < len; ++i) g.data[i] += n.grad.data[offset + i];
      }
      offset += len;
    }
  });
}

Var Tape::GatherRows(Var a, const std::vector<int> &rows) {
  const Tensor &A = value(a);
  const int c = A.cols();
  Tensor out = Tensor::Zeros(static_cast<int>(rows.size()), c);
  for (size_t i = 0; i < rows.size(); ++i) {
    Require(rows[i] >= 0 && rows[i] < A.rows(), "gather row out of range");
    std::copy_n(&A.data[static_cast<size_t>(rows[i]) * c], c, &out.data[i * c]);
  }
  return Push(std::move(out), requires_grad(a), [a, rows, c](Tape &t, Node &n) {
    Tensor &g = t.GradOf(a.id);
    for (size_t i = 0; i < rows.size(); ++i) {
      for (int j = 0; j < c; ++j) g.data[static_cast<size_t>(rows[i]) * c + j] += n.grad.data[i * c + j];
    }
  });
}

Var Tape::SliceRows(Var a, int begin, int count) {
  Require(begin >= 0 && count >= 0 && begin + count <= value(a).rows(), "slice rows out of range");
  std::vector<int> rows(count);
  for (int i = 0; i < count; ++i) rows[i] = begin + i;
  return GatherRows(a, rows);
}

Var Tape::SliceCols(Var a, int begin, int count) {
  const Tensor &A = value(a);
  Require(begin >= 0 && count >= 0 && begin + count <= A.cols(), "slice cols out of range");
  Tensor out = Tensor::Zeros(A.rows(), count);
  View(out) = View(A).middleCols(begin, count);
  return Push(std::move(out), requires_grad(a), [a, begin, count](Tape &t, Node &n) {
    View(t.GradOf(a.id)).middleCols(begin, count) += View(n.grad);
  });
}

Var Tape::Pick(Var a, int row, int col) {
  const Tensor &A = value(a);
  Require(row >= 0 && row < A.rows() && col >= 0 && col < A.cols(), "pick out of range");
  const int c = A.cols();
  return Push(Tensor::Filled(1, 1, A.at(row, col)), requires_grad(a),
              [a, row, col, c](Tape &t, Node &n) {
                t.GradOf(a.id).data[static_cast<size_t>(row) * c + col] += n.grad.data[0];
              });
}

Gradients Tape::Backward(Var loss) {
  Require(value(loss).size() == 1, "backward on a non-scalar of shape " + ShapeString(value(loss)));
  Gradients out;
  if (requires_grad(loss)) {
    GradOf(loss.id).data[0] = 1.0;
    for (int i = loss.id; i >= 0; --i) {
      Node &n = nodes_[i];
      if (!n.requires_grad || n.grad.data.empty() || !n.backward) continue;
      n.backward(*this, n);
    }
  }
  for (const auto &[name, id] : params_) {
    Node &n = nodes_[id];
    out[name] = n.grad.data.empty() ? Tensor::ZerosLike(n.value) : std::move(n.grad);
  }
  return out;
}

}  // namespace ssgc
