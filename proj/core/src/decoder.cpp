// SPDX-License-Identifier: Apache-2.0
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mgsa/model.hpp"

namespace mgsa {

namespace {

constexpr double kMaskValue = -1e9;

Tape::Id maybe_dropout(Tape& t, Tape::Id x, double rate, Rng* rng) {
  return rng == nullptr ? x : t.dropout(x, rate, *rng);
}

Tape::Id layer_norm_block(Tape& t, ParamStore& ps, const std::string& prefix, Tape::Id x) {
  return t.layer_norm(x, t.param(ps, ps.slot(prefix + ".gain")),
                      t.param(ps, ps.slot(prefix + ".bias")));
}

Tape::Id feed_forward_block(Tape& t, ParamStore& ps, const std::string& prefix, Tape::Id x) {
  return t.feed_forward_2layer(x, t.param(ps, ps.slot(prefix + ".w1")),
                               t.param(ps, ps.slot(prefix + ".b1")),
                               t.param(ps, ps.slot(prefix + ".w2")),
                               t.param(ps, ps.slot(prefix + ".b2")));
}

Tensor causal_mask(int k) {
  Tensor mask = Tensor::zeros(k, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) mask.at(i, j) = kMaskValue;
  return mask;
}

}  // namespace

Tape::Id decode_logits_on_tape(Tape& t, Model& m, Tape::Id enc_out,
                               const std::vector<int>& input_ids, Rng* dropout_rng) {
  ParamStore& ps = m.params();
  const ModelConfig& cfg = m.config();
  const double rate = cfg.dropout;
  const int k = static_cast<int>(input_ids.size());
  if (k == 0) throw std::invalid_argument("decode_logits_on_tape: empty decoder input");
  if (k > cfg.max_gen_len + 1)
    throw std::invalid_argument("decode_logits_on_tape: prefix length " + std::to_string(k) +
                                " exceeds max " + std::to_string(cfg.max_gen_len + 1));

  std::vector<int> pos(static_cast<size_t>(k));
  std::iota(pos.begin(), pos.end(), 0);
  Tape::Id x = t.add(t.embedding_lookup(t.param(ps, ps.slot("embed.token")), input_ids),
                     t.embedding_lookup(t.param(ps, ps.slot("embed.pos_dec")), pos));
  x = maybe_dropout(t, x, rate, dropout_rng);

  const Tensor mask = causal_mask(k);
  AttentionBias self_bias;
  self_bias.additive = &mask;  // consumed immediately by add_constant
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string p = "dec.l" + std::to_string(l);
    Tape::Id sa = multi_head_attention(t, ps, attention_slots(ps, p + ".self"), cfg.n_heads, x, x,
                                       self_bias);
    x = layer_norm_block(t, ps, p + ".ln1", t.add(x, maybe_dropout(t, sa, rate, dropout_rng)));
    Tape::Id ca = multi_head_attention(t, ps, attention_slots(ps, p + ".cross"), cfg.n_heads, x,
                                       enc_out, AttentionBias{});
    x = layer_norm_block(t, ps, p + ".ln2", t.add(x, maybe_dropout(t, ca, rate, dropout_rng)));
    Tape::Id ff = maybe_dropout(t, feed_forward_block(t, ps, p + ".ff", x), rate, dropout_rng);
    x = layer_norm_block(t, ps, p + ".ln3", t.add(x, ff));
  }
  return t.add_row_broadcast(t.matmul(x, t.param(ps, ps.slot("out.w"))),
                             t.param(ps, ps.slot("out.b")));
}

Tape::Id loss_on_tape(Tape& t, Model& m, const PreparedExample& ex,
                      const std::vector<int>& target_ids, Rng* dropout_rng) {
  if (target_ids.empty()) throw std::invalid_argument("loss_on_tape: empty target");
  EncodeResult enc = encode_on_tape(t, m, ex, dropout_rng);
  std::vector<int> input;
  input.reserve(target_ids.size());
  input.push_back(Vocab::kBos);
  input.insert(input.end(), target_ids.begin(), target_ids.end() - 1);
  Tape::Id logits = decode_logits_on_tape(t, m, enc.out, input, dropout_rng);
  return t.cross_entropy_nll(logits, target_ids, Vocab::kPad);
}

}  // namespace mgsa
