// SPDX-License-Identifier: Apache-2.0
#include "mgsa/ablation.hpp"

#include "mgsa/generate.hpp"
#include "mgsa/metrics.hpp"
#include "mgsa/train.hpp"

namespace mgsa {

std::vector<AblationArm> standard_ablation_arms(const ModelConfig& base) {
  std::vector<AblationArm> arms;
  arms.push_back({"full", base});

  ModelConfig m = base;
  m.use_adjacency = false;
  arms.push_back({"no_adjacency", m});

  m = base;
  m.use_entity_labels = false;
  arms.push_back({"no_entity_labels", m});

  m = base;
  m.use_word_labels = false;
  arms.push_back({"no_word_labels", m});

  m = base;
  m.lambda = 0.0;
  arms.push_back({"no_word_module", m});

  m = base;
  m.use_adjacency = false;
  m.use_entity_labels = false;
  m.use_word_labels = false;
  arms.push_back({"no_structure", m});

  for (double lambda : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    m = base;
    m.lambda = lambda;
    std::string name = "lambda_" + std::to_string(lambda);
    name.erase(name.find_last_not_of('0') + 1);
    if (!name.empty() && name.back() == '.') name.pop_back();
    arms.push_back({name, m});
  }
  return arms;
}

std::vector<AblationRow> run_ablation(const Corpus& train, const Corpus& test,
                                      const std::vector<AblationArm>& arms,
                                      const TrainConfig& cfg, int beam_width) {
  const Vocab vocab = build_vocab(train, cfg.min_count);
  std::vector<AblationRow> rows;
  for (const AblationArm& arm : arms) {
    ModelConfig mc = arm.model;
    mc.vocab_size = vocab.size();
    Model model(mc, cfg.seed);
    TrainResult tr = train_model(model, vocab, train, cfg, "");

    std::vector<std::string> candidates;
    std::vector<std::vector<std::string>> references;
    candidates.reserve(test.examples.size());
    references.reserve(test.examples.size());
    for (const Example& ex : test.examples) {
      PreparedExample prep = prepare_example(ex.graph, vocab, mc);
      candidates.push_back(generate_text(model, vocab, prep, beam_width));
      references.push_back(ex.references);
    }

    AblationRow row;
    row.name = arm.name;
    row.bleu4 = bleu4(candidates, references);
    row.rouge_l = rouge_l(candidates, references);
    row.exact_match = exact_match_rate(candidates, references);
    row.final_train_loss = tr.epoch_mean_loss.back();
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace mgsa
