// SPDX-License-Identifier: Apache-2.0
#include "mgsa/tape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgsa {

namespace {

constexpr double kLayerNormEps = 1e-5;

// C += A * B with optional transposes, ikj loop order.
void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c, bool trans_a, bool trans_b) {
  const int m = trans_a ? a.cols : a.rows;
  const int k = trans_a ? a.rows : a.cols;
  const int n = trans_b ? b.rows : b.cols;
  for (int i = 0; i < m; ++i) {
    double* ci = c.row(i);
    for (int kk = 0; kk < k; ++kk) {
      const double aik = trans_a ? a.at(kk, i) : a.at(i, kk);
      if (aik == 0.0) continue;
      if (!trans_b) {
        const double* bk = b.row(kk);
        for (int j = 0; j < n; ++j) ci[j] += aik * bk[j];
      } else {
        for (int j = 0; j < n; ++j) ci[j] += aik * b.at(j, kk);
      }
    }
  }
}

}  // namespace

Tape::Id Tape::push(Tensor value) {
  Node n;
  n.owned = std::move(value);
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

Tensor& Tape::grad_of(Id id) {
  Node& n = node(id);
  if (n.grad.v.empty()) {
    const Tensor& v = n.val();
    n.grad = Tensor::zeros(v.rows, v.cols);
  }
  return n.grad;
}

bool Tape::has_grad(Id id) const { return !nodes_[static_cast<size_t>(id)].grad.v.empty(); }

double Tape::scalar(Id id) const {
  const Tensor& t = value(id);
  if (t.rows != 1 || t.cols != 1)
    throw std::invalid_argument("scalar: node has shape " + t.shape_str());
  return t.v[0];
}

Tape::Id Tape::constant(Tensor v) { return push(std::move(v)); }

Tape::Id Tape::param(ParamStore& ps, int slot) {
  Node n;
  n.ref = &ps.value(slot);
  n.store = &ps;
  n.slot = slot;
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size()) - 1;
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.cols != tb.rows)
    throw std::invalid_argument("matmul: shape mismatch " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out(ta.rows, tb.cols);
  matmul_acc(ta, tb, out, false, false);
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, b, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      matmul_acc(g, t.value(b), t.grad_of(a), false, true);   // dA += g * B^T
      matmul_acc(t.value(a), g, t.grad_of(b), true, false);   // dB += A^T * g
    };
  }
  return id;
}

Tape::Id Tape::transpose(Id a) {
  const Tensor& ta = value(a);
  Tensor out(ta.cols, ta.rows);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = 0; j < ta.cols; ++j) out.at(j, i) = ta.at(i, j);
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) da.at(j, i) += g.at(i, j);
    };
  }
  return id;
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  check_same_shape(ta, tb, "add");
  Tensor out = ta;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += tb.v[i];
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, b, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      Tensor& db = t.grad_of(b);
      for (size_t i = 0; i < g.v.size(); ++i) {
        da.v[i] += g.v[i];
        db.v[i] += g.v[i];
      }
    };
  }
  return id;
}

Tape::Id Tape::add_row_broadcast(Id a, Id row) {
  const Tensor& ta = value(a);
  const Tensor& tr = value(row);
  if (tr.rows != 1 || tr.cols != ta.cols)
    throw std::invalid_argument("add_row_broadcast: shape mismatch " + ta.shape_str() + " vs " +
                                tr.shape_str());
  Tensor out = ta;
  for (int i = 0; i < out.rows; ++i) {
    double* oi = out.row(i);
    for (int j = 0; j < out.cols; ++j) oi[j] += tr.v[static_cast<size_t>(j)];
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, row, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      Tensor& dr = t.grad_of(row);
      for (size_t i = 0; i < g.v.size(); ++i) da.v[i] += g.v[i];
      for (int i = 0; i < g.rows; ++i)
        for (int j = 0; j < g.cols; ++j) dr.v[static_cast<size_t>(j)] += g.at(i, j);
    };
  }
  return id;
}

Tape::Id Tape::add_constant(Id a, const Tensor& c) {
  const Tensor& ta = value(a);
  check_same_shape(ta, c, "add_constant");
  Tensor out = ta;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] += c.v[i];
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      for (size_t i = 0; i < g.v.size(); ++i) da.v[i] += g.v[i];
    };
  }
  return id;
}

Tape::Id Tape::scale(Id a, double s) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  if (s != 0.0) {
    for (size_t i = 0; i < out.v.size(); ++i) out.v[i] = s * ta.v[i];
  }
  // s == 0 leaves the exact +0.0 fill, erasing input content bit-for-bit.
  Id id = push(std::move(out));
  if (record_ && s != 0.0) {
    node(id).bwd = [a, s, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      for (size_t i = 0; i < g.v.size(); ++i) da.v[i] += s * g.v[i];
    };
  }
  return id;
}

Tape::Id Tape::mul(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  check_same_shape(ta, tb, "mul");
  Tensor out = ta;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= tb.v[i];
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, b, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      const Tensor& va = t.value(a);
      const Tensor& vb = t.value(b);
      Tensor& da = t.grad_of(a);
      Tensor& db = t.grad_of(b);
      for (size_t i = 0; i < g.v.size(); ++i) {
        da.v[i] += g.v[i] * vb.v[i];
        db.v[i] += g.v[i] * va.v[i];
      }
    };
  }
  return id;
}

Tape::Id Tape::relu(Id a) {
  const Tensor& ta = value(a);
  Tensor out = ta;
  for (auto& x : out.v) x = x > 0.0 ? x : 0.0;
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      const Tensor& va = t.value(a);
      Tensor& da = t.grad_of(a);
      for (size_t i = 0; i < g.v.size(); ++i)
        if (va.v[i] > 0.0) da.v[i] += g.v[i];
    };
  }
  return id;
}

Tape::Id Tape::softmax_rows(Id a) {
  const Tensor& ta = value(a);
  Tensor out(ta.rows, ta.cols);
  for (int i = 0; i < ta.rows; ++i) {
    const double* xi = ta.row(i);
    double m = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < ta.cols; ++j) m = std::max(m, xi[j]);
    if (!std::isfinite(m))
      throw std::invalid_argument("softmax_rows: row " + std::to_string(i) + " has no finite entry");
    double* oi = out.row(i);
    double z = 0.0;
    for (int j = 0; j < ta.cols; ++j) {
      oi[j] = std::exp(xi[j] - m);
      z += oi[j];
    }
    for (int j = 0; j < ta.cols; ++j) oi[j] /= z;
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      const Tensor& y = t.value(id);
      Tensor& da = t.grad_of(a);
      for (int i = 0; i < g.rows; ++i) {
        const double* gi = g.row(i);
        const double* yi = y.row(i);
        double dot = 0.0;
        for (int j = 0; j < g.cols; ++j) dot += gi[j] * yi[j];
        double* di = da.row(i);
        for (int j = 0; j < g.cols; ++j) di[j] += yi[j] * (gi[j] - dot);
      }
    };
  }
  return id;
}

Tape::Id Tape::layer_norm(Id a, Id gain, Id bias) {
  const Tensor& ta = value(a);
  const Tensor& tg = value(gain);
  const Tensor& tb = value(bias);
  if (tg.rows != 1 || tg.cols != ta.cols || tb.rows != 1 || tb.cols != ta.cols)
    throw std::invalid_argument("layer_norm: affine shape mismatch " + ta.shape_str() + " vs " +
                                tg.shape_str() + "/" + tb.shape_str());
  const int c = ta.cols;
  Tensor out(ta.rows, c);
  std::vector<double> inv_std(static_cast<size_t>(ta.rows));
  std::vector<double> means(static_cast<size_t>(ta.rows));
  for (int i = 0; i < ta.rows; ++i) {
    const double* xi = ta.row(i);
    double mu = 0.0;
    for (int j = 0; j < c; ++j) mu += xi[j];
    mu /= c;
    double var = 0.0;
    for (int j = 0; j < c; ++j) var += (xi[j] - mu) * (xi[j] - mu);
    var /= c;
    const double is = 1.0 / std::sqrt(var + kLayerNormEps);
    means[static_cast<size_t>(i)] = mu;
    inv_std[static_cast<size_t>(i)] = is;
    double* oi = out.row(i);
    for (int j = 0; j < c; ++j) oi[j] = (xi[j] - mu) * is * tg.v[static_cast<size_t>(j)] + tb.v[static_cast<size_t>(j)];
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, gain, bias, id, inv_std, means](Tape& t) {
      const Tensor& g = t.node(id).grad;
      const Tensor& x = t.value(a);
      const Tensor& tg2 = t.value(gain);
      Tensor& da = t.grad_of(a);
      Tensor& dg = t.grad_of(gain);
      Tensor& db = t.grad_of(bias);
      const int c2 = x.cols;
      for (int i = 0; i < x.rows; ++i) {
        const double* xi = x.row(i);
        const double* gi = g.row(i);
        const double mu = means[static_cast<size_t>(i)];
        const double is = inv_std[static_cast<size_t>(i)];
        // dxhat, plus the two reduction terms of the layer-norm backward
        double sum_dxhat = 0.0;
        double sum_dxhat_xhat = 0.0;
        for (int j = 0; j < c2; ++j) {
          const double xhat = (xi[j] - mu) * is;
          const double dxhat = gi[j] * tg2.v[static_cast<size_t>(j)];
          sum_dxhat += dxhat;
          sum_dxhat_xhat += dxhat * xhat;
          dg.v[static_cast<size_t>(j)] += gi[j] * xhat;
          db.v[static_cast<size_t>(j)] += gi[j];
        }
        double* di = da.row(i);
        for (int j = 0; j < c2; ++j) {
          const double xhat = (xi[j] - mu) * is;
          const double dxhat = gi[j] * tg2.v[static_cast<size_t>(j)];
          di[j] += is * (dxhat - sum_dxhat / c2 - xhat * sum_dxhat_xhat / c2);
        }
      }
    };
  }
  return id;
}

Tape::Id Tape::embedding_lookup(Id table, std::vector<int> ids) {
  const Tensor& tt = value(table);
  Tensor out(static_cast<int>(ids.size()), tt.cols);
  for (size_t i = 0; i < ids.size(); ++i) {
    const int r = ids[i];
    if (r < 0 || r >= tt.rows)
      throw std::out_of_range("embedding_lookup: id " + std::to_string(r) + " not in 0.." +
                              std::to_string(tt.rows - 1));
    std::copy(tt.row(r), tt.row(r) + tt.cols, out.row(static_cast<int>(i)));
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [table, id, ids = std::move(ids)](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& dt = t.grad_of(table);
      for (size_t i = 0; i < ids.size(); ++i) {
        const double* gi = g.row(static_cast<int>(i));
        double* dr = dt.row(ids[i]);
        for (int j = 0; j < g.cols; ++j) dr[j] += gi[j];
      }
    };
  }
  return id;
}

Tape::Id Tape::concat_rows(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (ta.cols != tb.cols)
    throw std::invalid_argument("concat_rows: shape mismatch " + ta.shape_str() + " vs " +
                                tb.shape_str());
  Tensor out(ta.rows + tb.rows, ta.cols);
  std::copy(ta.v.begin(), ta.v.end(), out.v.begin());
  std::copy(tb.v.begin(), tb.v.end(), out.v.begin() + static_cast<long>(ta.v.size()));
  Id id = push(std::move(out));
  if (record_) {
    const int split = ta.rows;
    node(id).bwd = [a, b, id, split](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      Tensor& db = t.grad_of(b);
      const size_t na = da.v.size();
      for (size_t i = 0; i < na; ++i) da.v[i] += g.v[i];
      for (size_t i = 0; i < db.v.size(); ++i) db.v[i] += g.v[na + i];
      (void)split;
    };
  }
  return id;
}

Tape::Id Tape::slice_cols(Id a, int begin, int count) {
  const Tensor& ta = value(a);
  if (begin < 0 || count <= 0 || begin + count > ta.cols)
    throw std::invalid_argument("slice_cols: [" + std::to_string(begin) + ", " +
                                std::to_string(begin + count) + ") out of " + ta.shape_str());
  Tensor out(ta.rows, count);
  for (int i = 0; i < ta.rows; ++i)
    std::copy(ta.row(i) + begin, ta.row(i) + begin + count, out.row(i));
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id, begin, count](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      for (int i = 0; i < g.rows; ++i) {
        const double* gi = g.row(i);
        double* di = da.row(i) + begin;
        for (int j = 0; j < count; ++j) di[j] += gi[j];
      }
    };
  }
  return id;
}

Tape::Id Tape::concat_cols(const std::vector<Id>& parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: empty part list");
  const int rows = value(parts[0]).rows;
  int cols = 0;
  for (Id p : parts) {
    const Tensor& tp = value(p);
    if (tp.rows != rows)
      throw std::invalid_argument("concat_cols: shape mismatch " + tp.shape_str() + " vs " +
                                  value(parts[0]).shape_str());
    cols += tp.cols;
  }
  Tensor out(rows, cols);
  int off = 0;
  for (Id p : parts) {
    const Tensor& tp = value(p);
    for (int i = 0; i < rows; ++i)
      std::copy(tp.row(i), tp.row(i) + tp.cols, out.row(i) + off);
    off += tp.cols;
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [parts, id](Tape& t) {
      const Tensor& g = t.node(id).grad;
      int off2 = 0;
      for (Id p : parts) {
        Tensor& dp = t.grad_of(p);
        for (int i = 0; i < g.rows; ++i) {
          const double* gi = g.row(i) + off2;
          double* di = dp.row(i);
          for (int j = 0; j < dp.cols; ++j) di[j] += gi[j];
        }
        off2 += dp.cols;
      }
    };
  }
  return id;
}

Tape::Id Tape::sum_all(Id a) {
  const Tensor& ta = value(a);
  Tensor out(1, 1);
  double s = 0.0;
  for (double x : ta.v) s += x;
  out.v[0] = s;
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id](Tape& t) {
      const double g = t.node(id).grad.v[0];
      Tensor& da = t.grad_of(a);
      for (auto& d : da.v) d += g;
    };
  }
  return id;
}

Tape::Id Tape::dropout(Id a, double rate, Rng& rng) {
  if (rate == 0.0) return a;
  if (rate < 0.0 || rate >= 1.0)
    throw std::invalid_argument("dropout: rate " + std::to_string(rate) + " not in [0, 1)");
  const Tensor& ta = value(a);
  const double keep = 1.0 - rate;
  Tensor mask(ta.rows, ta.cols);
  for (auto& m : mask.v) m = rng.next_unit() < keep ? 1.0 / keep : 0.0;
  Tensor out = ta;
  for (size_t i = 0; i < out.v.size(); ++i) out.v[i] *= mask.v[i];
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [a, id, mask = std::move(mask)](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& da = t.grad_of(a);
      for (size_t i = 0; i < g.v.size(); ++i) da.v[i] += g.v[i] * mask.v[i];
    };
  }
  return id;
}

Tape::Id Tape::mean_pool_spans(Id x, std::vector<int> token_unit, int unit_count) {
  const Tensor& tx = value(x);
  if (static_cast<int>(token_unit.size()) != tx.rows)
    throw std::invalid_argument("mean_pool_spans: " + std::to_string(token_unit.size()) +
                                " assignments vs " + tx.shape_str());
  std::vector<int> counts(static_cast<size_t>(unit_count), 0);
  for (int u : token_unit) {
    if (u < -1 || u >= unit_count)
      throw std::out_of_range("mean_pool_spans: unit " + std::to_string(u) + " not in 0.." +
                              std::to_string(unit_count - 1));
    if (u >= 0) counts[static_cast<size_t>(u)]++;
  }
  for (int u = 0; u < unit_count; ++u)
    if (counts[static_cast<size_t>(u)] == 0)
      throw std::invalid_argument("mean_pool_spans: unit " + std::to_string(u) + " owns no tokens");
  Tensor out(unit_count, tx.cols);
  for (int i = 0; i < tx.rows; ++i) {
    const int u = token_unit[static_cast<size_t>(i)];
    if (u < 0) continue;
    const double* xi = tx.row(i);
    double* ou = out.row(u);
    for (int j = 0; j < tx.cols; ++j) ou[j] += xi[j];
  }
  for (int u = 0; u < unit_count; ++u) {
    double* ou = out.row(u);
    const double inv = 1.0 / counts[static_cast<size_t>(u)];
    for (int j = 0; j < tx.cols; ++j) ou[j] *= inv;
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [x, id, token_unit = std::move(token_unit), counts = std::move(counts)](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& dx = t.grad_of(x);
      for (int i = 0; i < dx.rows; ++i) {
        const int u = token_unit[static_cast<size_t>(i)];
        if (u < 0) continue;
        const double inv = 1.0 / counts[static_cast<size_t>(u)];
        const double* gu = g.row(u);
        double* di = dx.row(i);
        for (int j = 0; j < dx.cols; ++j) di[j] += gu[j] * inv;
      }
    };
  }
  return id;
}

Tape::Id Tape::gather_units(Id units, std::vector<int> token_unit) {
  const Tensor& tu = value(units);
  Tensor out(static_cast<int>(token_unit.size()), tu.cols);
  for (size_t i = 0; i < token_unit.size(); ++i) {
    const int u = token_unit[i];
    if (u >= tu.rows)
      throw std::out_of_range("gather_units: unit " + std::to_string(u) + " not in 0.." +
                              std::to_string(tu.rows - 1));
    if (u >= 0) std::copy(tu.row(u), tu.row(u) + tu.cols, out.row(static_cast<int>(i)));
    // marker rows stay exactly zero
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [units, id, token_unit = std::move(token_unit)](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& du = t.grad_of(units);
      for (size_t i = 0; i < token_unit.size(); ++i) {
        const int u = token_unit[i];
        if (u < 0) continue;
        const double* gi = g.row(static_cast<int>(i));
        double* dr = du.row(u);
        for (int j = 0; j < g.cols; ++j) dr[j] += gi[j];
      }
    };
  }
  return id;
}

Tape::Id Tape::label_bias(Id table, const IntMatrix* labels, int head) {
  const Tensor& tt = value(table);
  if (head < 0 || head >= tt.rows)
    throw std::out_of_range("label_bias: head " + std::to_string(head) + " not in 0.." +
                            std::to_string(tt.rows - 1));
  Tensor out(labels->rows, labels->cols);
  for (int i = 0; i < labels->rows; ++i) {
    double* oi = out.row(i);
    for (int j = 0; j < labels->cols; ++j) {
      const int l = labels->at(i, j);
      if (l < 0 || l >= tt.cols)
        throw std::out_of_range("label_bias: label " + std::to_string(l) + " not in 0.." +
                                std::to_string(tt.cols - 1));
      oi[j] = tt.at(head, l);
    }
  }
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [table, id, labels, head](Tape& t) {
      const Tensor& g = t.node(id).grad;
      Tensor& dt = t.grad_of(table);
      for (int i = 0; i < labels->rows; ++i)
        for (int j = 0; j < labels->cols; ++j)
          dt.at(head, labels->at(i, j)) += g.at(i, j);
    };
  }
  return id;
}

Tape::Id Tape::cross_entropy_nll(Id logits, std::vector<int> targets, int ignore_id) {
  const Tensor& tl = value(logits);
  if (static_cast<int>(targets.size()) != tl.rows)
    throw std::invalid_argument("cross_entropy_nll: " + std::to_string(targets.size()) +
                                " targets vs " + tl.shape_str());
  int counted = 0;
  for (int tid : targets) {
    if (tid == ignore_id) continue;
    if (tid < 0 || tid >= tl.cols)
      throw std::out_of_range("cross_entropy_nll: target id " + std::to_string(tid) +
                              " not in 0.." + std::to_string(tl.cols - 1));
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("cross_entropy_nll: no non-ignored targets");

  // cache softmax rows for the backward step
  Tensor probs(tl.rows, tl.cols);
  double loss = 0.0;
  for (int i = 0; i < tl.rows; ++i) {
    const double* xi = tl.row(i);
    double m = xi[0];
    for (int j = 1; j < tl.cols; ++j) m = std::max(m, xi[j]);
    double z = 0.0;
    double* pi = probs.row(i);
    for (int j = 0; j < tl.cols; ++j) {
      pi[j] = std::exp(xi[j] - m);
      z += pi[j];
    }
    for (int j = 0; j < tl.cols; ++j) pi[j] /= z;
    const int tid = targets[static_cast<size_t>(i)];
    if (tid != ignore_id) loss += std::log(z) + m - xi[tid];
  }
  Tensor out(1, 1);
  out.v[0] = loss / counted;
  Id id = push(std::move(out));
  if (record_) {
    node(id).bwd = [logits, id, targets = std::move(targets), ignore_id, counted,
                    probs = std::move(probs)](Tape& t) {
      const double g = t.node(id).grad.v[0];
      Tensor& dl = t.grad_of(logits);
      const double inv = g / counted;
      for (int i = 0; i < dl.rows; ++i) {
        const int tid = targets[static_cast<size_t>(i)];
        if (tid == ignore_id) continue;
        const double* pi = probs.row(i);
        double* di = dl.row(i);
        for (int j = 0; j < dl.cols; ++j) di[j] += inv * pi[j];
        di[tid] -= inv;
      }
    };
  }
  return id;
}

Tape::Id Tape::feed_forward_2layer(Id x, Id w1, Id b1, Id w2, Id b2) {
  Id h = relu(add_row_broadcast(matmul(x, w1), b1));
  return add_row_broadcast(matmul(h, w2), b2);
}

void Tape::backward(Id root, GradSink* sink) {
  if (!record_) throw std::logic_error("backward on a non-recording tape");
  const Tensor& rv = value(root);
  if (rv.rows != 1 || rv.cols != 1)
    throw std::invalid_argument("backward: root has shape " + rv.shape_str());
  sink_ = sink;
  grad_of(root).v[0] = 1.0;
  for (Id i = root; i >= 0; --i) {
    Node& n = node(i);
    if (n.grad.v.empty()) continue;
    if (n.bwd) n.bwd(*this);
    if (n.store != nullptr) {
      if (sink_ != nullptr) {
        Tensor& acc = sink_->accum(n.slot, n.grad.rows, n.grad.cols);
        for (size_t k = 0; k < n.grad.v.size(); ++k) acc.v[k] += n.grad.v[k];
      } else {
        Tensor& acc = n.store->grad(n.slot);
        for (size_t k = 0; k < n.grad.v.size(); ++k) acc.v[k] += n.grad.v[k];
      }
    }
  }
  sink_ = nullptr;
}

}  // namespace mgsa
