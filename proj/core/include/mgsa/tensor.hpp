// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_TENSOR_HPP_
#define MGSA_TENSOR_HPP_

#include <cstddef>
#include <string>
#include <vector>

namespace mgsa {

// Dense row-major matrix of f64 values, laid out sequence x feature.
// The batch axis is realized by iterating examples, so two axes suffice;
// row vectors (1 x c) double as bias/feature vectors.
struct Tensor {
  int rows = 0;
  int cols = 0;
  std::vector<double> v;

  Tensor() = default;
  Tensor(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * c, 0.0) {}

  static Tensor zeros(int r, int c) { return Tensor(r, c); }
  static Tensor full(int r, int c, double x);
  static Tensor row_vector(std::vector<double> values);
  static Tensor from_rows(const std::vector<std::vector<double>>& rows);

  double& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return v.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return v.data() + static_cast<size_t>(i) * cols; }

  size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  double max_abs() const;
  double l2_norm() const;
  std::string shape_str() const;  // e.g. "3x5"
};

// Row-major integer matrix; used for label matrices, adjacency and
// shortest-path distance tables.
struct IntMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> v;

  IntMatrix() = default;
  IntMatrix(int r, int c, int fill = 0)
      : rows(r), cols(c), v(static_cast<size_t>(r) * c, fill) {}

  int& at(int i, int j) { return v[static_cast<size_t>(i) * cols + j]; }
  int at(int i, int j) const { return v[static_cast<size_t>(i) * cols + j]; }
  bool operator==(const IntMatrix& o) const = default;
};

// Throws std::invalid_argument naming both shapes when they differ.
void check_same_shape(const Tensor& a, const Tensor& b, const char* op);

}  // namespace mgsa

#endif  // MGSA_TENSOR_HPP_
