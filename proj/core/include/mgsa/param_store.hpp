// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_PARAM_STORE_HPP_
#define MGSA_PARAM_STORE_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "mgsa/tensor.hpp"

namespace mgsa {

// Named parameter tensors with paired gradient accumulators. Slot order is
// insertion order and is the canonical iteration/serialization order.
// A single writer may mutate values/gradients at a time; concurrent readers
// are fine.
class ParamStore {
 public:
  int add(const std::string& name, Tensor value);

  int slot(const std::string& name) const;           // throws if unknown
  bool contains(const std::string& name) const;

  int count() const { return static_cast<int>(entries_.size()); }
  const std::string& name(int slot) const { return entries_[static_cast<size_t>(slot)].name; }

  Tensor& value(int slot) { return entries_[static_cast<size_t>(slot)].value; }
  const Tensor& value(int slot) const { return entries_[static_cast<size_t>(slot)].value; }
  Tensor& grad(int slot) { return entries_[static_cast<size_t>(slot)].grad; }
  const Tensor& grad(int slot) const { return entries_[static_cast<size_t>(slot)].grad; }

  Tensor& value(const std::string& name) { return value(slot(name)); }
  const Tensor& value(const std::string& name) const { return value(slot(name)); }

  void zero_grad();
  size_t total_coords() const;
  double grad_l2_norm() const;

 private:
  struct Entry {
    std::string name;
    Tensor value;
    Tensor grad;  // same shape as value
  };
  std::vector<Entry> entries_;
  std::unordered_map<std::string, int> index_;
};

// Per-example gradient sink: one optional tensor per parameter slot,
// allocated lazily. Lets batch members compute gradients in parallel and be
// reduced in example order afterwards, which keeps training results
// independent of the worker count.
class GradSink {
 public:
  explicit GradSink(const ParamStore& ps) : slots_(static_cast<size_t>(ps.count())) {}

  Tensor& accum(int slot, int rows, int cols);
  const Tensor* get(int slot) const;

 private:
  struct Slot {
    bool used = false;
    Tensor grad;
  };
  std::vector<Slot> slots_;
};

}  // namespace mgsa

#endif  // MGSA_PARAM_STORE_HPP_
