// SPDX-License-Identifier: Apache-2.0
#include "mgsa/generate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mgsa {

namespace {

std::vector<double> log_softmax(const std::vector<double>& logits) {
  double m = logits.at(0);
  for (double x : logits) m = std::max(m, x);
  double z = 0.0;
  for (double x : logits) z += std::exp(x - m);
  const double lz = std::log(z) + m;
  std::vector<double> out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lz;
  return out;
}

int argmax_lowest_id(const std::vector<double>& row) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(row.size()); ++i)
    if (row[static_cast<size_t>(i)] > row[static_cast<size_t>(best)]) best = i;
  return best;
}

struct Hypothesis {
  std::vector<int> ids;  // generated tokens, <eos> excluded
  double logprob = 0.0;
  bool finished = false;

  // Generated token count for length normalization; <eos> counts.
  int norm_len() const {
    return finished ? static_cast<int>(ids.size()) + 1
                    : std::max(1, static_cast<int>(ids.size()));
  }
};

bool lexicographically_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

std::vector<int> greedy_search(const StepScorer& scorer, int max_len) {
  std::vector<int> prefix{Vocab::kBos};
  std::vector<int> out;
  for (int step = 0; step < max_len; ++step) {
    const int best = argmax_lowest_id(scorer(prefix));
    if (best == Vocab::kEos) break;
    out.push_back(best);
    prefix.push_back(best);
  }
  return out;
}

std::vector<int> beam_search(const StepScorer& scorer, int width, int max_len) {
  if (width <= 0) throw std::invalid_argument("beam_search: width must be positive");
  std::vector<Hypothesis> active{Hypothesis{}};
  std::vector<Hypothesis> finished;

  for (int step = 0; step < max_len && !active.empty(); ++step) {
    struct Candidate {
      std::vector<int> ids;
      double logprob;
      int token;
    };
    std::vector<Candidate> candidates;
    for (const Hypothesis& h : active) {
      std::vector<int> prefix;
      prefix.reserve(h.ids.size() + 1);
      prefix.push_back(Vocab::kBos);
      prefix.insert(prefix.end(), h.ids.begin(), h.ids.end());
      const std::vector<double> lp = log_softmax(scorer(prefix));

      // Top `width` token ids by (logprob desc, id asc).
      std::vector<int> order(lp.size());
      for (size_t i = 0; i < lp.size(); ++i) order[i] = static_cast<int>(i);
      std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return lp[static_cast<size_t>(a)] > lp[static_cast<size_t>(b)];
      });
      const int take = std::min<int>(width, static_cast<int>(order.size()));
      for (int r = 0; r < take; ++r) {
        const int tok = order[static_cast<size_t>(r)];
        candidates.push_back(Candidate{h.ids, h.logprob + lp[static_cast<size_t>(tok)], tok});
      }
    }
    // Stable sort keeps generation order (parent order, then token rank) on
    // equal scores, which realizes the id-order tie rule.
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const Candidate& a, const Candidate& b) { return a.logprob > b.logprob; });
    std::vector<Hypothesis> next;
    for (const Candidate& c : candidates) {
      if (c.token == Vocab::kEos) {
        Hypothesis h;
        h.ids = c.ids;
        h.logprob = c.logprob;
        h.finished = true;
        finished.push_back(std::move(h));
      } else if (static_cast<int>(next.size()) < width) {
        Hypothesis h;
        h.ids = c.ids;
        h.ids.push_back(c.token);
        h.logprob = c.logprob;
        next.push_back(std::move(h));
      }
    }
    active = std::move(next);
  }

  // Final pool: finished hypotheses plus whatever is still active at the
  // cap, compared by normalized score.
  std::vector<Hypothesis> pool = std::move(finished);
  for (Hypothesis& h : active) pool.push_back(std::move(h));
  if (pool.empty()) return {};
  const Hypothesis* best = &pool[0];
  double best_score = best->logprob / best->norm_len();
  for (size_t i = 1; i < pool.size(); ++i) {
    const double score = pool[i].logprob / pool[i].norm_len();
    if (score > best_score ||
        (score == best_score && lexicographically_less(pool[i].ids, best->ids))) {
      best = &pool[i];
      best_score = score;
    }
  }
  return best->ids;
}

StepScorer model_scorer(Model& m, const PreparedExample& ex) {
  Tensor enc_value;
  {
    Tape t(false);
    enc_value = t.value(encode_on_tape(t, m, ex, nullptr).out);
  }
  Model* model = &m;
  const PreparedExample* exp = &ex;
  return [model, exp, enc_value](const std::vector<int>& prefix) {
    (void)exp;
    Tape t(false);
    Tape::Id enc = t.constant(enc_value);
    Tape::Id logits = decode_logits_on_tape(t, *model, enc, prefix, nullptr);
    const Tensor& lv = t.value(logits);
    const double* last = lv.row(lv.rows - 1);
    return std::vector<double>(last, last + lv.cols);
  };
}

std::vector<int> generate_ids(Model& m, const PreparedExample& ex, int beam_width) {
  const StepScorer scorer = model_scorer(m, ex);
  if (beam_width == 1) return greedy_search(scorer, m.config().max_gen_len);
  return beam_search(scorer, beam_width, m.config().max_gen_len);
}

std::string detokenize(const std::vector<int>& ids, const Vocab& v) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] == Vocab::kEos) continue;
    if (!out.empty()) out += ' ';
    out += v.token(ids[i]);
  }
  return out;
}

std::string generate_text(Model& m, const Vocab& v, const PreparedExample& ex, int beam_width) {
  return detokenize(generate_ids(m, ex, beam_width), v);
}

}  // namespace mgsa
