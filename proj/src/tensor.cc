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

#include "ssgc/tensor.h"

#include <functional>
#include <numeric>

#include "ssgc/error.h"

namespace ssgc {

Tensor::Tensor(std::vector<int> s, const std::vector<double> &d)
    : Tensor(std::move(s), Buffer(d.begin(), d.end())) {}

Tensor::Tensor(std::vector<int> s, Buffer d) : shape(std::move(s)), data(std::move(d)) {
  if (shape.size() > 2) throw ShapeError("tensors of rank > 2 are not supported");
  size_t n = 1;
  for (int dim : shape) {
    if (dim < 0) throw ShapeError("negative dimension");
    n *= static_cast<size_t>(dim);
  }
  if (n != data.size()) {
    throw ShapeError("data length " + std::to_string(data.size()) + " does not match shape");
  }
}

Tensor Tensor::Zeros(int rows, int cols) { return Filled(rows, cols, 0.0); }

Tensor Tensor::Filled(int rows, int cols, double value) {
  return Tensor({rows, cols}, Buffer(static_cast<size_t>(rows) * cols, value));
}

Tensor Tensor::Scalar(double value) { return Tensor({}, Buffer{value}); }

Tensor Tensor::Row(std::vector<double> values) {
  int n = static_cast<int>(values.size());
  return Tensor({1, n}, std::move(values));
}

Tensor Tensor::Matrix(int rows, int cols, std::vector<double> values) {
  return Tensor({rows, cols}, std::move(values));
}

Tensor Tensor::Gaussian(int rows, int cols, double stddev, Rng &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t = Zeros(rows, cols);
  for (double &v : t.data) v = dist(rng);
  return t;
}

Tensor Tensor::ZerosLike(const Tensor &t) {
  Tensor z;
  z.shape = t.shape;
  z.data.assign(t.data.size(), 0.0);
  return z;
}

double Tensor::item() const {
  if (data.size() != 1) throw ShapeError("item() on tensor of shape " + ShapeString(*this));
  return data[0];
}

std::string ShapeString(const Tensor &t) {
  std::string s = "(";
  for (size_t i = 0; i < t.shape.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(t.shape[i]);
  }
  return s + ")";
}

SparseMatrix SparseMatrix::FromDense(const Tensor &t) {
  SparseMatrix m;
  m.rows = t.rows();
  m.cols = t.cols();
  for (int r = 0; r < m.rows; ++r) {
    for (int c = 0; c < m.cols; ++c) {
      const double v = t.at(r, c);
      if (v == 0.0) continue;
      m.col.push_back(c);
      m.val.push_back(v);
    }
    m.row_ptr.push_back(static_cast<int>(m.val.size()));
  }
  return m;
}

SparseMatrix SparseMatrix::BlockDiagonal(const std::vector<const SparseMatrix *> &blocks) {
  SparseMatrix m;
  for (const SparseMatrix *b : blocks) {
    for (int r = 0; r < b->rows; ++r) {
      for (int k = b->row_ptr[r]; k < b->row_ptr[r + 1]; ++k) {
        m.col.push_back(b->col[k] + m.cols);
        m.val.push_back(b->val[k]);
      }
      m.row_ptr.push_back(static_cast<int>(m.val.size()));
    }
    m.rows += b->rows;
    m.cols += b->cols;
  }
  return m;
}

Tensor SparseMatrix::ToDense() const {
  Tensor t = Tensor::Zeros(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k) t.at(r, col[k]) += val[k];
  }
  return t;
}

}  // namespace ssgc
