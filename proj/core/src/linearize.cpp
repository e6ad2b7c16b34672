// SPDX-License-Identifier: Apache-2.0
#include "mgsa/linearize.hpp"

#include <stdexcept>
#include <string>

#include "mgsa/text.hpp"

namespace mgsa {

int entity_level_len(const Triple& t) {
  return 3 + static_cast<int>(split_words(t.head).size() + split_words(t.relation).size() +
                              split_words(t.tail).size());
}

int word_level_len(const Triple& t) {
  return 2 * static_cast<int>(split_words(t.head).size() + split_words(t.relation).size() +
                              split_words(t.tail).size());
}

EntityLinearization linearize_entity_level(const KnowledgeGraph& g, const Vocab& v, int max_len) {
  EntityLinearization out;
  for (size_t t = 0; t < g.triples().size(); ++t) {
    const Triple& tr = g.triples()[t];
    if (static_cast<int>(out.token_ids.size()) + entity_level_len(tr) > max_len) {
      if (t == 0)
        throw std::invalid_argument("linearize_entity_level: triple 0 alone exceeds max length " +
                                    std::to_string(max_len));
      break;
    }
    const int ti = static_cast<int>(t);
    const int units[3] = {g.head_unit(ti), g.relation_unit(ti), g.tail_unit(ti)};
    const int markers[3] = {Vocab::kHead, Vocab::kRelMark, Vocab::kTailMark};
    const std::string* parts[3] = {&tr.head, &tr.relation, &tr.tail};
    for (int role = 0; role < 3; ++role) {
      out.token_ids.push_back(markers[role]);
      out.token_unit.push_back(kMarkerUnit);
      for (const std::string& w : split_words(*parts[role])) {
        out.token_ids.push_back(v.id(w));
        out.token_unit.push_back(units[role]);
      }
    }
    out.triples_kept = ti + 1;
  }
  return out;
}

WordLinearization linearize_word_level(const KnowledgeGraph& g, const Vocab& v, int max_len) {
  WordLinearization out;
  for (size_t t = 0; t < g.triples().size(); ++t) {
    const Triple& tr = g.triples()[t];
    if (static_cast<int>(out.token_ids.size()) + word_level_len(tr) > max_len) {
      if (t == 0)
        throw std::invalid_argument("linearize_word_level: triple 0 alone exceeds max length " +
                                    std::to_string(max_len));
      break;
    }
    const int ti = static_cast<int>(t);
    const int units[3] = {g.head_unit(ti), g.relation_unit(ti), g.tail_unit(ti)};
    const std::string* parts[3] = {&tr.head, &tr.relation, &tr.tail};
    for (int role = 0; role < 3; ++role) {
      int offset = 0;
      for (const std::string& w : split_words(*parts[role])) {
        const int node = static_cast<int>(out.nodes.size());
        out.nodes.push_back(WordNode{units[role], offset, ti, role});
        out.token_ids.push_back(Vocab::kWordMark);
        out.token_node.push_back(node);
        out.token_ids.push_back(v.id(w));
        out.token_node.push_back(node);
        ++offset;
      }
    }
    out.triples_kept = ti + 1;
  }
  return out;
}

KnowledgeGraph fit_to_max_len(const KnowledgeGraph& g, int max_len) {
  int ent_len = 0;
  int word_len = 0;
  size_t kept = 0;
  for (const Triple& t : g.triples()) {
    ent_len += entity_level_len(t);
    word_len += word_level_len(t);
    if (ent_len > max_len || word_len > max_len) break;
    ++kept;
  }
  if (kept == 0)
    throw std::invalid_argument("fit_to_max_len: triple 0 alone exceeds max length " +
                                std::to_string(max_len));
  if (kept == g.triples().size()) return g;
  std::vector<Triple> prefix(g.triples().begin(), g.triples().begin() + static_cast<long>(kept));
  return KnowledgeGraph(std::move(prefix));
}

std::vector<Triple> reparse_entity_sequence(const std::vector<int>& token_ids, const Vocab& v) {
  std::vector<Triple> out;
  size_t i = 0;
  auto read_segment = [&](int marker) {
    if (i >= token_ids.size() || token_ids[i] != marker)
      throw std::invalid_argument("reparse_entity_sequence: expected marker " + v.token(marker) +
                                  " at position " + std::to_string(i));
    ++i;
    std::vector<std::string> words;
    while (i < token_ids.size() && token_ids[i] != Vocab::kHead &&
           token_ids[i] != Vocab::kRelMark && token_ids[i] != Vocab::kTailMark) {
      words.push_back(v.token(token_ids[i]));
      ++i;
    }
    if (words.empty())
      throw std::invalid_argument("reparse_entity_sequence: empty segment before position " +
                                  std::to_string(i));
    return join_words(words);
  };
  while (i < token_ids.size()) {
    Triple t;
    t.head = read_segment(Vocab::kHead);
    t.relation = read_segment(Vocab::kRelMark);
    t.tail = read_segment(Vocab::kTailMark);
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace mgsa
