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

#ifndef SSGC_TENSOR_H_
#define SSGC_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <new>
#include <string>
#include <vector>

#include "ssgc/rng.h"

namespace ssgc {

// 64-byte aligned storage. Vectorized kernels split loops by alignment, so a
// fixed alignment keeps results independent of where the heap put a buffer.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlign{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U> &) {}

  T *allocate(size_t n) { return static_cast<T *>(::operator new(n * sizeof(T), kAlign)); }
  void deallocate(T *p, size_t) { ::operator delete(p, kAlign); }
  template <typename U>
  bool operator==(const AlignedAllocator<U> &) const { return true; }
};

using Buffer = std::vector<double, AlignedAllocator<double>>;

// Dense row-major float64 tensor of rank 0, 1 or 2. Rank-1 tensors behave as
// 1 x n rows in matrix operations.
struct Tensor {
  std::vector<int> shape;
  Buffer data;

  Tensor() = default;
  Tensor(std::vector<int> shape, const std::vector<double> &data);
  Tensor(std::vector<int> shape, Buffer data);
  Tensor(std::vector<int> shape, std::initializer_list<double> data)
      : Tensor(std::move(shape), Buffer(data)) {}

  std::vector<double> values() const { return {data.begin(), data.end()}; }

  static Tensor Zeros(int rows, int cols);
  static Tensor Filled(int rows, int cols, double value);
  static Tensor Scalar(double value);
  static Tensor Row(std::vector<double> values);
  static Tensor Matrix(int rows, int cols, std::vector<double> values);
  static Tensor Gaussian(int rows, int cols, double stddev, Rng &rng);
  static Tensor ZerosLike(const Tensor &t);

  int rank() const { return static_cast<int>(shape.size()); }
  int rows() const { return shape.size() == 2 ? shape[0] : 1; }
  int cols() const { return shape.empty() ? 1 : shape.back(); }
  size_t size() const { return data.size(); }

  double &at(int r, int c) { return data[static_cast<size_t>(r) * cols() + c]; }
  double at(int r, int c) const { return data[static_cast<size_t>(r) * cols() + c]; }
  double item() const;

  bool same_shape(const Tensor &o) const { return rows() == o.rows() && cols() == o.cols(); }
  bool operator==(const Tensor &) const = default;
};

std::string ShapeString(const Tensor &t);

// Compressed sparse rows; used for constant graph operators.
struct SparseMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> row_ptr = {0};
  std::vector<int> col;
  std::vector<double> val;

  static SparseMatrix FromDense(const Tensor &t);
  // Block-diagonal stacking.
  static SparseMatrix BlockDiagonal(const std::vector<const SparseMatrix *> &blocks);
  Tensor ToDense() const;
  size_t nnz() const { return val.size(); }
};

}  // namespace ssgc

#endif  // SSGC_TENSOR_H_
