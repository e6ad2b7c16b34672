// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_GENERATE_HPP_
#define MGSA_GENERATE_HPP_

#include <functional>
#include <string>
#include <vector>

#include "mgsa/model.hpp"

namespace mgsa {

// Next-token logits for a prefix that starts with <bos>. The search layer is
// written against this seam so synthetic scorers can drive it in tests.
using StepScorer = std::function<std::vector<double>(const std::vector<int>& prefix)>;

// Argmax decoding from <bos> until <eos> or max_len tokens; logit ties break
// toward the lowest token id. Returns generated ids without <bos>/<eos>.
std::vector<int> greedy_search(const StepScorer& scorer, int max_len);

// Length-normalized beam search (cumulative log-probability divided by
// generated token count, <eos> included). Each unfinished hypothesis expands
// with its top `width` tokens; the top `width` unfinished candidates by
// cumulative log-probability survive, and candidates that chose <eos> move
// to the finished pool. At the length cap unfinished hypotheses compete with
// finished ones under the same normalized score. Ties break toward the
// lexicographically smaller token sequence. width == 1 reduces to greedy.
std::vector<int> beam_search(const StepScorer& scorer, int width, int max_len);

// Model-bound scorer: encodes the example once, then re-runs the decoder
// over each prefix (no dropout).
StepScorer model_scorer(Model& m, const PreparedExample& ex);

std::vector<int> generate_ids(Model& m, const PreparedExample& ex, int beam_width);

// Drops <eos> and joins tokens with single spaces.
std::string detokenize(const std::vector<int>& ids, const Vocab& v);

std::string generate_text(Model& m, const Vocab& v, const PreparedExample& ex, int beam_width);

}  // namespace mgsa

#endif  // MGSA_GENERATE_HPP_
