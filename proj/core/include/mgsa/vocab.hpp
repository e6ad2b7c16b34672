// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_VOCAB_HPP_
#define MGSA_VOCAB_HPP_

#include <string>
#include <unordered_map>
#include <vector>

#include "mgsa/kg.hpp"

namespace mgsa {

// Token table with fixed reserved ids 0..7: <H>, <R>, <T>, [N], <bos>, <eos>,
// <pad>, <unk>. Unknown tokens map to <unk> on lookup.
class Vocab {
 public:
  static constexpr int kHead = 0;      // <H>
  static constexpr int kRelMark = 1;   // <R>
  static constexpr int kTailMark = 2;  // <T>
  static constexpr int kWordMark = 3;  // [N]
  static constexpr int kBos = 4;
  static constexpr int kEos = 5;
  static constexpr int kPad = 6;
  static constexpr int kUnk = 7;
  static constexpr int kReservedCount = 8;

  Vocab();  // reserved tokens only

  // Inserts the token if absent; returns its id either way.
  int add(const std::string& token);
  // Id lookup; absent tokens resolve to <unk>.
  int id(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::string& token(int id) const;  // throws std::out_of_range
  int size() const { return static_cast<int>(id_to_token_.size()); }

  std::vector<int> encode_words(const std::vector<std::string>& words) const;

  // Full id -> token list, for serialization.
  const std::vector<std::string>& tokens() const { return id_to_token_; }
  // Rebuilds a vocab from a serialized token list; validates the reserved
  // prefix. Throws std::invalid_argument on mismatch or duplicates.
  static Vocab from_tokens(const std::vector<std::string>& tokens);

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, int> token_to_id_;
};

// Counts words across all triple components and reference texts; keeps words
// with count >= min_count, in first-appearance order after the reserved ids.
Vocab build_vocab(const Corpus& c, int min_count);

}  // namespace mgsa

#endif  // MGSA_VOCAB_HPP_
