// SPDX-License-Identifier: Apache-2.0
#include "mgsa/param_store.hpp"

#include <cmath>
#include <stdexcept>

namespace mgsa {

int ParamStore::add(const std::string& name, Tensor value) {
  if (index_.count(name)) throw std::invalid_argument("duplicate parameter: " + name);
  Entry e;
  e.name = name;
  e.grad = Tensor::zeros(value.rows, value.cols);
  e.value = std::move(value);
  entries_.push_back(std::move(e));
  int slot = static_cast<int>(entries_.size()) - 1;
  index_.emplace(name, slot);
  return slot;
}

int ParamStore::slot(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::out_of_range("unknown parameter: " + name);
  return it->second;
}

bool ParamStore::contains(const std::string& name) const { return index_.count(name) != 0; }

void ParamStore::zero_grad() {
  for (auto& e : entries_)
    for (auto& g : e.grad.v) g = 0.0;
}

size_t ParamStore::total_coords() const {
  size_t n = 0;
  for (const auto& e : entries_) n += e.value.size();
  return n;
}

double ParamStore::grad_l2_norm() const {
  double s = 0.0;
  for (const auto& e : entries_)
    for (double g : e.grad.v) s += g * g;
  return std::sqrt(s);
}

Tensor& GradSink::accum(int slot, int rows, int cols) {
  auto& s = slots_[static_cast<size_t>(slot)];
  if (!s.used) {
    s.grad = Tensor::zeros(rows, cols);
    s.used = true;
  }
  return s.grad;
}

const Tensor* GradSink::get(int slot) const {
  const auto& s = slots_[static_cast<size_t>(slot)];
  return s.used ? &s.grad : nullptr;
}

}  // namespace mgsa
