// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "mgsa/model.hpp"

namespace mgsa {

namespace {

Tape::Id linear_proj(Tape& t, ParamStore& ps, Tape::Id x, int w_slot, int b_slot) {
  return t.add_row_broadcast(t.matmul(x, t.param(ps, w_slot)), t.param(ps, b_slot));
}

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

std::vector<int> iota_ids(int n) {
  std::vector<int> ids(static_cast<size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  return ids;
}

// Token + learned absolute position embeddings.
Tape::Id embed_sequence(Tape& t, ParamStore& ps, const std::vector<int>& token_ids,
                        int pos_table_slot) {
  Tape::Id tok = t.embedding_lookup(t.param(ps, ps.slot("embed.token")), token_ids);
  Tape::Id pos = t.embedding_lookup(t.param(ps, pos_table_slot),
                                    iota_ids(static_cast<int>(token_ids.size())));
  return t.add(tok, pos);
}

}  // namespace

Tape::Id multi_head_attention(Tape& t, ParamStore& ps, const AttentionSlots& s, int n_heads,
                              Tape::Id q_in, Tape::Id kv_in, const AttentionBias& bias,
                              std::vector<Tape::Id>* head_logits) {
  const int d = t.value(q_in).cols;
  const int dh = d / n_heads;
  Tape::Id q = linear_proj(t, ps, q_in, s.wq, s.bq);
  Tape::Id k = linear_proj(t, ps, kv_in, s.wk, s.bk);
  Tape::Id v = linear_proj(t, ps, kv_in, s.wv, s.bv);
  std::vector<Tape::Id> heads;
  heads.reserve(static_cast<size_t>(n_heads));
  for (int h = 0; h < n_heads; ++h) {
    Tape::Id qh = t.slice_cols(q, h * dh, dh);
    Tape::Id kh = t.slice_cols(k, h * dh, dh);
    Tape::Id vh = t.slice_cols(v, h * dh, dh);
    Tape::Id logits = t.scale(t.matmul(qh, t.transpose(kh)), 1.0 / std::sqrt(dh));
    if (bias.additive != nullptr) logits = t.add_constant(logits, *bias.additive);
    if (bias.table_slot >= 0)
      logits = t.add(logits, t.label_bias(t.param(ps, bias.table_slot), bias.labels, h));
    if (head_logits != nullptr) head_logits->push_back(logits);
    heads.push_back(t.matmul(t.softmax_rows(logits), vh));
  }
  Tape::Id concat = n_heads == 1 ? heads[0] : t.concat_cols(heads);
  return linear_proj(t, ps, concat, s.wo, s.bo);
}

EncodeResult encode_on_tape(Tape& t, Model& m, const PreparedExample& ex, Rng* dropout_rng,
                            EncoderTrace* trace) {
  ParamStore& ps = m.params();
  const ModelConfig& cfg = m.config();
  const double rate = cfg.dropout;
  const int m_units = ex.graph.unit_count();

  // Entity-level stack: linear attention, pool to units, structure attention
  // with adjacency and entity-label biases, gather back, feed-forward.
  Tape::Id xe = maybe_dropout(
      t, embed_sequence(t, ps, ex.ent.token_ids, ps.slot("embed.pos_ent")), rate, dropout_rng);
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string p = "enc_ent.l" + std::to_string(l);
    Tape::Id attn = multi_head_attention(t, ps, attention_slots(ps, p + ".lin"), cfg.n_heads, xe,
                                         xe, AttentionBias{});
    Tape::Id x_lin =
        layer_norm_block(t, ps, p + ".ln1", t.add(xe, maybe_dropout(t, attn, rate, dropout_rng)));
    Tape::Id x_p = t.mean_pool_spans(x_lin, ex.ent.token_unit, m_units);
    AttentionBias bias;
    if (cfg.use_adjacency) bias.additive = &ex.adj_f;
    if (cfg.use_entity_labels) {
      bias.table_slot = ps.slot(p + ".str.bias_table");
      bias.labels = &ex.mats.rel_e;
    }
    std::vector<Tape::Id> logits;
    Tape::Id x_g = multi_head_attention(t, ps, attention_slots(ps, p + ".str"), cfg.n_heads, x_p,
                                        x_p, bias, trace != nullptr ? &logits : nullptr);
    Tape::Id gathered =
        maybe_dropout(t, t.gather_units(x_g, ex.ent.token_unit), rate, dropout_rng);
    Tape::Id y = t.add(gathered, x_lin);
    Tape::Id ff = maybe_dropout(t, feed_forward_block(t, ps, p + ".ff", y), rate, dropout_rng);
    if (trace != nullptr) {
      trace->ent_x_lin.push_back(t.value(x_lin));
      trace->ent_pooled.push_back(t.value(x_p));
      trace->ent_struct.push_back(t.value(x_g));
      trace->ent_pre_ff.push_back(t.value(y));
      std::vector<Tensor> lv;
      for (Tape::Id id : logits) lv.push_back(t.value(id));
      trace->ent_logits.push_back(std::move(lv));
    }
    xe = layer_norm_block(t, ps, p + ".ln2", t.add(y, ff));
  }

  // Word-level stack: self-attention biased by the word labels.
  Tape::Id xw = maybe_dropout(
      t, embed_sequence(t, ps, ex.word.token_ids, ps.slot("embed.pos_word")), rate, dropout_rng);
  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string p = "enc_word.l" + std::to_string(l);
    AttentionBias bias;
    if (cfg.use_word_labels) {
      bias.table_slot = ps.slot(p + ".attn.bias_table");
      bias.labels = &ex.rel_w_tokens;
    }
    Tape::Id attn = multi_head_attention(t, ps, attention_slots(ps, p + ".attn"), cfg.n_heads, xw,
                                         xw, bias);
    xw = layer_norm_block(t, ps, p + ".ln1",
                          t.add(xw, maybe_dropout(t, attn, rate, dropout_rng)));
    Tape::Id ff = maybe_dropout(t, feed_forward_block(t, ps, p + ".ff", xw), rate, dropout_rng);
    xw = layer_norm_block(t, ps, p + ".ln2", t.add(xw, ff));
    if (trace != nullptr) trace->word_out.push_back(t.value(xw));
  }

  // Aggregation: c = [X~E || lambda XW], Xc = MHA(c), O = LN(FF(Xc + c) + Xc).
  Tape::Id c = t.concat_rows(xe, t.scale(xw, cfg.lambda));
  Tape::Id xc = maybe_dropout(
      t,
      multi_head_attention(t, ps, attention_slots(ps, "agg.attn"), cfg.n_heads, c, c,
                           AttentionBias{}),
      rate, dropout_rng);
  Tape::Id ff = maybe_dropout(t, feed_forward_block(t, ps, "agg.ff", t.add(xc, c)), rate,
                              dropout_rng);
  Tape::Id o = layer_norm_block(t, ps, "agg.ln", t.add(ff, xc));
  if (trace != nullptr) {
    trace->agg_c = t.value(c);
    trace->agg_xc = t.value(xc);
  }
  EncodeResult res;
  res.out = o;
  res.n_entity = static_cast<int>(ex.ent.token_ids.size());
  return res;
}

}  // namespace mgsa
