// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_TAPE_HPP_
#define MGSA_TAPE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "mgsa/param_store.hpp"
#include "mgsa/rng.hpp"
#include "mgsa/tensor.hpp"

namespace mgsa {

// Define-by-run tape. Every op computes its forward value immediately and,
// when recording, registers an analytic backward step. backward(root) seeds
// d(root)=1 on a 1x1 node and accumulates parameter gradients either into
// the bound ParamStore or into an external GradSink.
//
// Lifetime rules: a ParamStore bound via param() and any IntMatrix passed to
// label_bias() must outlive the tape; parameter values must not change
// between forward construction and backward().
class Tape {
 public:
  using Id = int;

  explicit Tape(bool record = true) : record_(record) {}

  Id constant(Tensor v);
  Id param(ParamStore& ps, int slot);

  // c[i][j] = sum_k a[i][k] * b[k][j]
  Id matmul(Id a, Id b);
  Id transpose(Id a);
  Id add(Id a, Id b);                       // same shape
  Id add_row_broadcast(Id a, Id row);       // a: r x c, row: 1 x c
  Id add_constant(Id a, const Tensor& c);   // c is not differentiated
  Id scale(Id a, double s);                 // s == 0 writes exact +0.0
  Id mul(Id a, Id b);                       // elementwise
  Id relu(Id a);
  Id softmax_rows(Id a);                    // rejects rows that are all -inf
  Id layer_norm(Id a, Id gain, Id bias);    // row-wise, eps 1e-5 in the sqrt
  Id embedding_lookup(Id table, std::vector<int> ids);
  Id concat_rows(Id a, Id b);               // sequence-axis concatenation
  Id slice_cols(Id a, int begin, int count);
  Id concat_cols(const std::vector<Id>& parts);
  Id sum_all(Id a);                         // 1x1
  Id dropout(Id a, double rate, Rng& rng);  // identity when rate == 0

  // token_unit[i] in 0..unit_count-1, or -1 for marker tokens that belong to
  // no unit. Pooling averages each unit's tokens (markers excluded) and
  // requires every unit to own at least one token; gather writes each unit
  // row back to all its token positions and zero rows at markers.
  Id mean_pool_spans(Id x, std::vector<int> token_unit, int unit_count);
  Id gather_units(Id units, std::vector<int> token_unit);

  // out[i][j] = table[head][labels(i, j)]; labels must outlive the tape.
  Id label_bias(Id table, const IntMatrix* labels, int head);

  // Mean negative log-likelihood over targets != ignore_id. logits: k x V,
  // targets.size() == k. Throws if a target id is outside [0, V) or if no
  // target survives the ignore filter.
  Id cross_entropy_nll(Id logits, std::vector<int> targets, int ignore_id);

  // relu(x W1 + b1) W2 + b2, the d -> 4d -> d block used across the model.
  Id feed_forward_2layer(Id x, Id w1, Id b1, Id w2, Id b2);

  const Tensor& value(Id id) const { return nodes_[static_cast<size_t>(id)].val(); }
  double scalar(Id id) const;

  // Runs reverse accumulation from a 1x1 root. Gradients of param() leaves go
  // to `sink` when given, else to the bound ParamStore's accumulators.
  void backward(Id root, GradSink* sink = nullptr);

  size_t node_count() const { return nodes_.size(); }
  bool recording() const { return record_; }

 private:
  struct Node {
    Tensor owned;
    const Tensor* ref = nullptr;  // set for param leaves
    Tensor grad;                  // lazily allocated
    std::function<void(Tape&)> bwd;
    ParamStore* store = nullptr;  // param leaves only
    int slot = -1;

    const Tensor& val() const { return ref ? *ref : owned; }
  };

  Id push(Tensor value);
  Node& node(Id id) { return nodes_[static_cast<size_t>(id)]; }
  Tensor& grad_of(Id id);
  bool has_grad(Id id) const;

  std::vector<Node> nodes_;
  GradSink* sink_ = nullptr;
  bool record_;
};

}  // namespace mgsa

#endif  // MGSA_TAPE_HPP_
