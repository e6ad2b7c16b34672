// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_ABLATION_HPP_
#define MGSA_ABLATION_HPP_

#include <string>
#include <vector>

#include "mgsa/model.hpp"
#include "mgsa/run_config.hpp"

namespace mgsa {

struct AblationArm {
  std::string name;
  ModelConfig model;
};

// The switch grid: full model; adjacency / entity-label / word-label biases
// off; word module off (lambda = 0); all structure off; and the lambda sweep
// {0, 0.25, 0.5, 0.75, 1}. Switches zero the corresponding bias input, so
// every arm trains the same parameter set.
std::vector<AblationArm> standard_ablation_arms(const ModelConfig& base);

struct AblationRow {
  std::string name;
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  double exact_match = 0.0;
  double final_train_loss = 0.0;
};

// Trains one fresh model per arm on `train` (fresh vocab from `train` with
// cfg.min_count) and scores generations on `test`.
std::vector<AblationRow> run_ablation(const Corpus& train, const Corpus& test,
                                      const std::vector<AblationArm>& arms,
                                      const TrainConfig& cfg, int beam_width);

}  // namespace mgsa

#endif  // MGSA_ABLATION_HPP_
