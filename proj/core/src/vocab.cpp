// SPDX-License-Identifier: Apache-2.0
#include "mgsa/vocab.hpp"

#include <stdexcept>

#include "mgsa/text.hpp"

namespace mgsa {

namespace {
const char* const kReservedTokens[Vocab::kReservedCount] = {
    "<H>", "<R>", "<T>", "[N]", "<bos>", "<eos>", "<pad>", "<unk>"};
}

Vocab::Vocab() {
  for (const char* t : kReservedTokens) {
    token_to_id_.emplace(t, static_cast<int>(id_to_token_.size()));
    id_to_token_.emplace_back(t);
  }
}

int Vocab::add(const std::string& token) {
  auto [it, inserted] = token_to_id_.try_emplace(token, static_cast<int>(id_to_token_.size()));
  if (inserted) id_to_token_.push_back(token);
  return it->second;
}

int Vocab::id(const std::string& token) const {
  auto it = token_to_id_.find(token);
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocab::contains(const std::string& token) const {
  return token_to_id_.find(token) != token_to_id_.end();
}

const std::string& Vocab::token(int id) const {
  if (id < 0 || id >= size())
    throw std::out_of_range("Vocab::token: id " + std::to_string(id) + " not in 0.." +
                            std::to_string(size() - 1));
  return id_to_token_[static_cast<size_t>(id)];
}

std::vector<int> Vocab::encode_words(const std::vector<std::string>& words) const {
  std::vector<int> ids;
  ids.reserve(words.size());
  for (const std::string& w : words) ids.push_back(id(w));
  return ids;
}

Vocab Vocab::from_tokens(const std::vector<std::string>& tokens) {
  if (tokens.size() < kReservedCount)
    throw std::invalid_argument("Vocab::from_tokens: fewer tokens than the reserved prefix");
  for (int i = 0; i < kReservedCount; ++i)
    if (tokens[static_cast<size_t>(i)] != kReservedTokens[i])
      throw std::invalid_argument("Vocab::from_tokens: reserved id " + std::to_string(i) +
                                  " is \"" + tokens[static_cast<size_t>(i)] + "\", expected \"" +
                                  kReservedTokens[i] + "\"");
  Vocab v;
  for (size_t i = kReservedCount; i < tokens.size(); ++i) {
    if (v.contains(tokens[i]))
      throw std::invalid_argument("Vocab::from_tokens: duplicate token \"" + tokens[i] + "\"");
    v.add(tokens[i]);
  }
  return v;
}

Vocab build_vocab(const Corpus& c, int min_count) {
  std::unordered_map<std::string, long> counts;
  std::vector<std::string> first_seen;
  auto feed = [&](const std::string& text) {
    for (std::string& w : split_words(text)) {
      auto [it, inserted] = counts.try_emplace(w, 0);
      if (inserted) first_seen.push_back(w);
      it->second++;
    }
  };
  for (const Example& ex : c.examples) {
    for (const Triple& t : ex.graph.triples()) {
      feed(t.head);
      feed(t.relation);
      feed(t.tail);
    }
    for (const std::string& ref : ex.references) feed(ref);
  }
  Vocab v;
  for (const std::string& w : first_seen)
    if (counts.at(w) >= min_count && !v.contains(w)) v.add(w);
  return v;
}

}  // namespace mgsa
