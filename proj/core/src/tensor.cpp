// SPDX-License-Identifier: Apache-2.0
#include "mgsa/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace mgsa {

Tensor Tensor::full(int r, int c, double x) {
  Tensor t(r, c);
  for (auto& e : t.v) e = x;
  return t;
}

Tensor Tensor::row_vector(std::vector<double> values) {
  Tensor t;
  t.rows = 1;
  t.cols = static_cast<int>(values.size());
  t.v = std::move(values);
  return t;
}

Tensor Tensor::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Tensor();
  Tensor t(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
  for (int i = 0; i < t.rows; ++i) {
    if (static_cast<int>(rows[i].size()) != t.cols)
      throw std::invalid_argument("from_rows: ragged input");
    for (int j = 0; j < t.cols; ++j) t.at(i, j) = rows[i][j];
  }
  return t;
}

bool Tensor::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double Tensor::max_abs() const {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

double Tensor::l2_norm() const {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string Tensor::shape_str() const {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                a.shape_str() + " vs " + b.shape_str());
  }
}

}  // namespace mgsa
