// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_MODEL_HPP_
#define MGSA_MODEL_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mgsa/graph_structure.hpp"
#include "mgsa/kg.hpp"
#include "mgsa/linearize.hpp"
#include "mgsa/param_store.hpp"
#include "mgsa/tape.hpp"
#include "mgsa/vocab.hpp"

namespace mgsa {

// Model + structural hyperparameters. The ablation switches keep their
// parameters registered and simply stop the corresponding bias from entering
// the attention logits, so parameter counts stay comparable across arms.
struct ModelConfig {
  int d_model = 32;
  int n_heads = 2;
  int n_layers = 2;  // per encoder stack and for the decoder
  double lambda = 0.5;
  int d_clip = 16;
  int p_clip = 16;
  int max_input_len = 256;
  int max_gen_len = 128;
  double dropout = 0.0;
  int vocab_size = 0;  // set after the vocabulary is built
  bool use_adjacency = true;
  bool use_entity_labels = true;
  bool use_word_labels = true;

  int head_dim() const { return d_model / n_heads; }
  int word_label_count() const { return word_label::count(d_clip, p_clip); }
  void validate() const;  // throws std::invalid_argument
};

// Owns the parameter store. Registration order is the canonical
// serialization order shared with checkpoints.
class Model {
 public:
  Model(const ModelConfig& cfg, uint64_t seed);

  const ModelConfig& config() const { return cfg_; }
  ParamStore& params() { return ps_; }
  const ParamStore& params() const { return ps_; }

 private:
  ModelConfig cfg_;
  ParamStore ps_;
};

// Slot bundle of one attention block's projections.
struct AttentionSlots {
  int wq = -1, bq = -1, wk = -1, bk = -1, wv = -1, bv = -1, wo = -1, bo = -1;
};

AttentionSlots attention_slots(const ParamStore& ps, const std::string& prefix);

// Optional additive material for attention logits: a dense bias shared by
// all heads (adjacency, causal mask) and/or a per-head label-bias table
// indexed by a label matrix. Pointed-to data must outlive the tape.
struct AttentionBias {
  const Tensor* additive = nullptr;
  int table_slot = -1;
  const IntMatrix* labels = nullptr;
};

// Multi-head attention with output projection: per head h,
// softmax(Q_h K_h^T / sqrt(d_head) + additive + table[h][labels]) V_h,
// heads concatenated then projected. When head_logits is non-null the
// pre-softmax logit matrices are appended per head (for inspection).
Tape::Id multi_head_attention(Tape& t, ParamStore& ps, const AttentionSlots& s, int n_heads,
                              Tape::Id q_in, Tape::Id kv_in, const AttentionBias& bias,
                              std::vector<Tape::Id>* head_logits = nullptr);

// One example, preprocessed for the encoder: truncated to the max input
// length, linearized at both granularities, with structure matrices built.
// Owns everything the tape will reference during forward/backward.
struct PreparedExample {
  KnowledgeGraph graph;
  EntityLinearization ent;
  WordLinearization word;
  StructureMatrices mats;
  IntMatrix rel_w_tokens;  // word labels at token resolution
  Tensor adj_f;            // adjacency as doubles, the additive bias of Eq. 4
};

// Clusters by head, truncates to the max input length (whole triples), and
// builds both linearizations plus all structure matrices.
PreparedExample prepare_example(const KnowledgeGraph& g, const Vocab& v, const ModelConfig& cfg);

// Reference text -> target ids: words then <eos>, truncated to max_gen_len.
std::vector<int> encode_target(const std::string& text, const Vocab& v, int max_gen_len);

// Intermediate encoder values (copies), captured when requested by tests.
struct EncoderTrace {
  std::vector<Tensor> ent_x_lin;     // per layer: after the linear-attention sublayer
  std::vector<Tensor> ent_pooled;    // per layer: X_p
  std::vector<Tensor> ent_struct;    // per layer: X_g
  std::vector<Tensor> ent_pre_ff;    // per layer: gather(X_g) + X_lin
  std::vector<std::vector<Tensor>> ent_logits;  // per layer, per head: Eq. 4 logits
  std::vector<Tensor> word_out;      // per layer output
  Tensor agg_c;                      // Eq. 8 concatenation
  Tensor agg_xc;                     // Eq. 9 attention output
};

struct EncodeResult {
  Tape::Id out = -1;   // (n + n') x d fused representation O
  int n_entity = 0;    // segment boundary: first n rows are entity-level
};

// Full encoder: both granularity stacks plus the aggregation module.
// dropout_rng == nullptr disables dropout (evaluation mode).
EncodeResult encode_on_tape(Tape& t, Model& m, const PreparedExample& ex, Rng* dropout_rng,
                            EncoderTrace* trace = nullptr);

// Decoder forward over a teacher-forced or generated prefix; returns the
// k x |V| logit matrix. enc_out is a node on the same tape.
Tape::Id decode_logits_on_tape(Tape& t, Model& m, Tape::Id enc_out,
                               const std::vector<int>& input_ids, Rng* dropout_rng);

// Teacher-forced mean NLL of target_ids (which end in <eos>); decoder input
// is <bos> + target_ids[:-1]. Pad targets are excluded from the mean.
Tape::Id loss_on_tape(Tape& t, Model& m, const PreparedExample& ex,
                      const std::vector<int>& target_ids, Rng* dropout_rng);

}  // namespace mgsa

#endif  // MGSA_MODEL_HPP_
