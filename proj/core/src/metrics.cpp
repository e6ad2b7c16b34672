// SPDX-License-Identifier: Apache-2.0
#include "mgsa/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <unordered_map>

#include "mgsa/text.hpp"

namespace mgsa {

namespace {

constexpr double kBleuEpsilon = 1e-9;

void validate_inputs(const std::vector<std::string>& candidates,
                     const std::vector<std::vector<std::string>>& references, const char* who) {
  if (candidates.empty()) throw std::invalid_argument(std::string(who) + ": empty candidate set");
  if (candidates.size() != references.size())
    throw std::invalid_argument(std::string(who) + ": " + std::to_string(candidates.size()) +
                                " candidates vs " + std::to_string(references.size()) +
                                " reference sets");
  for (const auto& refs : references)
    if (refs.empty()) throw std::invalid_argument(std::string(who) + ": empty reference set");
}

// n-gram multiset of a token sequence, keyed by joined words.
std::unordered_map<std::string, int> ngram_counts(const std::vector<std::string>& words, int n) {
  std::unordered_map<std::string, int> counts;
  if (static_cast<int>(words.size()) < n) return counts;
  for (size_t i = 0; i + static_cast<size_t>(n) <= words.size(); ++i) {
    std::string key = words[i];
    for (int k = 1; k < n; ++k) {
      key += '\x1f';
      key += words[i + static_cast<size_t>(k)];
    }
    counts[key]++;
  }
  return counts;
}

int lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  const size_t la = a.size();
  const size_t lb = b.size();
  std::vector<int> prev(lb + 1, 0);
  std::vector<int> cur(lb + 1, 0);
  for (size_t i = 1; i <= la; ++i) {
    for (size_t j = 1; j <= lb; ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[lb];
}

}  // namespace

double bleu4(const std::vector<std::string>& candidates,
             const std::vector<std::vector<std::string>>& references) {
  validate_inputs(candidates, references, "bleu4");
  long matched[4] = {0, 0, 0, 0};
  long total[4] = {0, 0, 0, 0};
  long cand_len_sum = 0;
  long ref_len_sum = 0;

  for (size_t i = 0; i < candidates.size(); ++i) {
    const std::vector<std::string> cand = split_words(candidates[i]);
    std::vector<std::vector<std::string>> refs;
    refs.reserve(references[i].size());
    for (const std::string& r : references[i]) refs.push_back(split_words(r));

    cand_len_sum += static_cast<long>(cand.size());
    // Closest reference length; ties break toward the shorter reference.
    long best_ref = static_cast<long>(refs[0].size());
    for (const auto& r : refs) {
      const long rl = static_cast<long>(r.size());
      const long cl = static_cast<long>(cand.size());
      if (std::labs(rl - cl) < std::labs(best_ref - cl) ||
          (std::labs(rl - cl) == std::labs(best_ref - cl) && rl < best_ref))
        best_ref = rl;
    }
    ref_len_sum += best_ref;

    for (int n = 1; n <= 4; ++n) {
      const auto cand_counts = ngram_counts(cand, n);
      std::unordered_map<std::string, int> max_ref_counts;
      for (const auto& r : refs)
        for (const auto& [gram, count] : ngram_counts(r, n))
          max_ref_counts[gram] = std::max(max_ref_counts[gram], count);
      long m = 0;
      long t = 0;
      for (const auto& [gram, count] : cand_counts) {
        t += count;
        auto it = max_ref_counts.find(gram);
        if (it != max_ref_counts.end()) m += std::min(count, it->second);
      }
      matched[n - 1] += m;
      total[n - 1] += t;
    }
  }

  if (cand_len_sum == 0) return 0.0;
  double log_precision_sum = 0.0;
  for (int n = 0; n < 4; ++n) {
    const double p = (static_cast<double>(matched[n]) + kBleuEpsilon) /
                     (static_cast<double>(total[n]) + kBleuEpsilon);
    log_precision_sum += 0.25 * std::log(p);
  }
  const double bp =
      cand_len_sum >= ref_len_sum
          ? 1.0
          : std::exp(1.0 - static_cast<double>(ref_len_sum) / static_cast<double>(cand_len_sum));
  return 100.0 * bp * std::exp(log_precision_sum);
}

double rouge_l(const std::vector<std::string>& candidates,
               const std::vector<std::vector<std::string>>& references) {
  return score_report(candidates, references).rouge_l;
}

ScoreReport score_report(const std::vector<std::string>& candidates,
                         const std::vector<std::vector<std::string>>& references) {
  validate_inputs(candidates, references, "rouge_l");
  ScoreReport report;
  double f1_sum = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const std::vector<std::string> cand = split_words(candidates[i]);
    double best_f1 = 0.0;
    for (const std::string& r : references[i]) {
      const std::vector<std::string> ref = split_words(r);
      if (cand.empty() || ref.empty()) continue;
      const int lcs = lcs_length(cand, ref);
      if (lcs == 0) continue;
      const double p = static_cast<double>(lcs) / static_cast<double>(cand.size());
      const double rec = static_cast<double>(lcs) / static_cast<double>(ref.size());
      best_f1 = std::max(best_f1, 2.0 * p * rec / (p + rec));
    }
    report.per_example_rouge_l.push_back(100.0 * best_f1);
    f1_sum += best_f1;
  }
  report.rouge_l = 100.0 * f1_sum / static_cast<double>(candidates.size());
  report.bleu4 = bleu4(candidates, references);
  return report;
}

double exact_match_rate(const std::vector<std::string>& candidates,
                        const std::vector<std::vector<std::string>>& references) {
  validate_inputs(candidates, references, "exact_match_rate");
  long hits = 0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    const std::string cand = join_words(split_words(candidates[i]));
    for (const std::string& r : references[i]) {
      if (cand == join_words(split_words(r))) {
        ++hits;
        break;
      }
    }
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(candidates.size());
}

}  // namespace mgsa
