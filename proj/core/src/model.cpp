// SPDX-License-Identifier: Apache-2.0
#include "mgsa/model.hpp"

#include <stdexcept>

#include "mgsa/text.hpp"

namespace mgsa {

void ModelConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("ModelConfig: " + msg); };
  if (d_model <= 0 || n_heads <= 0 || n_layers <= 0) fail("dimensions must be positive");
  if (d_model % n_heads != 0) fail("d_model must be divisible by n_heads");
  if (lambda < 0.0 || lambda > 1.0) fail("lambda must be in [0, 1]");
  if (d_clip <= 0 || p_clip <= 0) fail("clip bounds must be positive");
  if (max_input_len <= 0 || max_gen_len <= 0) fail("max lengths must be positive");
  if (dropout < 0.0 || dropout >= 1.0) fail("dropout must be in [0, 1)");
  if (vocab_size < Vocab::kReservedCount) fail("vocab_size must cover the reserved tokens");
}

namespace {

constexpr double kInitRange = 0.08;

void init_uniform(Tensor& t, Rng& rng) {
  for (auto& x : t.v) x = (rng.next_unit() * 2.0 - 1.0) * kInitRange;
}

class Registrar {
 public:
  Registrar(ParamStore& ps, Rng& rng) : ps_(ps), rng_(rng) {}

  void weight(const std::string& name, int rows, int cols) {
    Tensor t(rows, cols);
    init_uniform(t, rng_);
    ps_.add(name, std::move(t));
  }
  void zeros(const std::string& name, int rows, int cols) {
    ps_.add(name, Tensor::zeros(rows, cols));
  }
  void attention(const std::string& prefix, int d) {
    for (const char* p : {"wq", "wk", "wv", "wo"}) weight(prefix + "." + p, d, d);
    for (const char* p : {"bq", "bk", "bv", "bo"}) zeros(prefix + "." + p, 1, d);
  }
  void layer_norm(const std::string& prefix, int d) {
    ps_.add(prefix + ".gain", Tensor::full(1, d, 1.0));
    ps_.add(prefix + ".bias", Tensor::zeros(1, d));
  }
  void feed_forward(const std::string& prefix, int d) {
    weight(prefix + ".w1", d, 4 * d);
    zeros(prefix + ".b1", 1, 4 * d);
    weight(prefix + ".w2", 4 * d, d);
    zeros(prefix + ".b2", 1, d);
  }

 private:
  ParamStore& ps_;
  Rng& rng_;
};

}  // namespace

Model::Model(const ModelConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  Registrar r(ps_, rng);
  const int d = cfg_.d_model;

  r.weight("embed.token", cfg_.vocab_size, d);
  r.weight("embed.pos_ent", cfg_.max_input_len, d);
  r.weight("embed.pos_word", cfg_.max_input_len, d);
  r.weight("embed.pos_dec", cfg_.max_gen_len + 1, d);

  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "enc_ent.l" + std::to_string(l);
    r.attention(p + ".lin", d);
    r.layer_norm(p + ".ln1", d);
    r.attention(p + ".str", d);
    r.zeros(p + ".str.bias_table", cfg_.n_heads, entity_label::kCount);
    r.feed_forward(p + ".ff", d);
    r.layer_norm(p + ".ln2", d);
  }
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "enc_word.l" + std::to_string(l);
    r.attention(p + ".attn", d);
    r.zeros(p + ".attn.bias_table", cfg_.n_heads, cfg_.word_label_count());
    r.layer_norm(p + ".ln1", d);
    r.feed_forward(p + ".ff", d);
    r.layer_norm(p + ".ln2", d);
  }
  r.attention("agg.attn", d);
  r.feed_forward("agg.ff", d);
  r.layer_norm("agg.ln", d);
  for (int l = 0; l < cfg_.n_layers; ++l) {
    const std::string p = "dec.l" + std::to_string(l);
    r.attention(p + ".self", d);
    r.layer_norm(p + ".ln1", d);
    r.attention(p + ".cross", d);
    r.layer_norm(p + ".ln2", d);
    r.feed_forward(p + ".ff", d);
    r.layer_norm(p + ".ln3", d);
  }
  r.weight("out.w", d, cfg_.vocab_size);
  r.zeros("out.b", 1, cfg_.vocab_size);
}

AttentionSlots attention_slots(const ParamStore& ps, const std::string& prefix) {
  AttentionSlots s;
  s.wq = ps.slot(prefix + ".wq");
  s.bq = ps.slot(prefix + ".bq");
  s.wk = ps.slot(prefix + ".wk");
  s.bk = ps.slot(prefix + ".bk");
  s.wv = ps.slot(prefix + ".wv");
  s.bv = ps.slot(prefix + ".bv");
  s.wo = ps.slot(prefix + ".wo");
  s.bo = ps.slot(prefix + ".bo");
  return s;
}

PreparedExample prepare_example(const KnowledgeGraph& g, const Vocab& v, const ModelConfig& cfg) {
  PreparedExample ex;
  ex.graph = fit_to_max_len(cluster_by_head(g), cfg.max_input_len);
  ex.ent = linearize_entity_level(ex.graph, v, cfg.max_input_len);
  ex.word = linearize_word_level(ex.graph, v, cfg.max_input_len);
  ex.mats = build_structure(ex.graph, ex.word, cfg.d_clip, cfg.p_clip);
  ex.rel_w_tokens = expand_word_labels_to_tokens(ex.mats.rel_w, ex.word.token_node);
  ex.adj_f = Tensor(ex.mats.adj.rows, ex.mats.adj.cols);
  for (int i = 0; i < ex.mats.adj.rows; ++i)
    for (int j = 0; j < ex.mats.adj.cols; ++j)
      ex.adj_f.at(i, j) = static_cast<double>(ex.mats.adj.at(i, j));
  return ex;
}

std::vector<int> encode_target(const std::string& text, const Vocab& v, int max_gen_len) {
  std::vector<std::string> words = split_words(text);
  if (static_cast<int>(words.size()) > max_gen_len - 1)
    words.resize(static_cast<size_t>(max_gen_len - 1));
  std::vector<int> ids = v.encode_words(words);
  ids.push_back(Vocab::kEos);
  return ids;
}

}  // namespace mgsa
