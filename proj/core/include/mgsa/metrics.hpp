// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_METRICS_HPP_
#define MGSA_METRICS_HPP_

#include <string>
#include <vector>

namespace mgsa {

// Corpus-level BLEU-4 in [0, 100]: geometric mean of modified 1..4-gram
// precisions times the brevity penalty. Whitespace tokenization. Each
// precision bucket is smoothed as (matched + 1e-9) / (total + 1e-9), so an
// empty bucket (short toy sentences) contributes a factor of exactly 1 and a
// candidate equal to its reference scores exactly 100. The brevity reference
// length is the closest reference length per candidate, ties toward the
// shorter. Throws std::invalid_argument on an empty candidate set or a
// count mismatch.
double bleu4(const std::vector<std::string>& candidates,
             const std::vector<std::vector<std::string>>& references);

// Mean ROUGE-L F1 (beta = 1) in [0, 100]; per example the best reference by
// F1 counts. Same error contract as bleu4.
double rouge_l(const std::vector<std::string>& candidates,
               const std::vector<std::vector<std::string>>& references);

// Share of candidates whose whitespace-normalized text equals any of their
// references, in [0, 100]. Used by the structure-sensitivity harness.
double exact_match_rate(const std::vector<std::string>& candidates,
                        const std::vector<std::vector<std::string>>& references);

struct ScoreReport {
  double bleu4 = 0.0;
  double rouge_l = 0.0;
  std::vector<double> per_example_rouge_l;  // per-example breakdown
};

ScoreReport score_report(const std::vector<std::string>& candidates,
                         const std::vector<std::vector<std::string>>& references);

}  // namespace mgsa

#endif  // MGSA_METRICS_HPP_
