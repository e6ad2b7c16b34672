// SPDX-License-Identifier: Apache-2.0
#include "mgsa/kg.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"
#include "mgsa/text.hpp"

namespace mgsa {

namespace {

void require_words(const std::string& component, const std::string& value, int triple_index) {
  if (split_words(value).empty())
    throw std::invalid_argument("triple " + std::to_string(triple_index) + ": empty " + component);
}

}  // namespace

KnowledgeGraph::KnowledgeGraph(std::vector<Triple> triples) : triples_(std::move(triples)) {
  head_units_.reserve(triples_.size());
  tail_units_.reserve(triples_.size());
  for (size_t t = 0; t < triples_.size(); ++t) {
    Triple& tr = triples_[t];
    tr.head = trim(tr.head);
    tr.relation = trim(tr.relation);
    tr.tail = trim(tr.tail);
    require_words("head", tr.head, static_cast<int>(t));
    require_words("relation", tr.relation, static_cast<int>(t));
    require_words("tail", tr.tail, static_cast<int>(t));
    for (const std::string* label : {&tr.head, &tr.tail}) {
      if (entity_index_.find(*label) == entity_index_.end()) {
        entity_index_.emplace(*label, static_cast<int>(entities_.size()));
        entities_.push_back(*label);
      }
    }
    head_units_.push_back(entity_index_.at(tr.head));
    tail_units_.push_back(entity_index_.at(tr.tail));
    relations_.push_back(tr.relation);
  }
}

int KnowledgeGraph::entity_unit(const std::string& label) const {
  auto it = entity_index_.find(label);
  if (it == entity_index_.end())
    throw std::invalid_argument("entity_unit: unknown entity \"" + label + "\"");
  return it->second;
}

Corpus parse_corpus(const std::string& path, const std::string& split) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open corpus file: " + path);
  Corpus corpus;
  corpus.split = split;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": malformed JSON: " + e.what());
    }
    try {
      if (!obj.is_object() || !obj.contains("triples") || !obj.contains("text"))
        throw std::invalid_argument("expected object with \"triples\" and \"text\"");
      std::vector<Triple> triples;
      for (const auto& t : obj.at("triples")) {
        if (!t.is_array() || t.size() != 3)
          throw std::invalid_argument("each triple must be [head, relation, tail]");
        triples.push_back(Triple{t[0].get<std::string>(), t[1].get<std::string>(),
                                 t[2].get<std::string>()});
      }
      Example ex;
      ex.graph = KnowledgeGraph(std::move(triples));
      for (const auto& r : obj.at("text")) {
        std::string ref = r.get<std::string>();
        if (trim(ref).empty()) throw std::invalid_argument("empty reference text");
        ex.references.push_back(std::move(ref));
      }
      if (ex.references.empty()) throw std::invalid_argument("example has no reference text");
      corpus.examples.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return corpus;
}

KnowledgeGraph cluster_by_head(const KnowledgeGraph& g) {
  std::vector<std::string> head_order;
  std::unordered_map<std::string, std::vector<const Triple*>> groups;
  for (const Triple& t : g.triples()) {
    auto [it, inserted] = groups.try_emplace(t.head);
    if (inserted) head_order.push_back(t.head);
    it->second.push_back(&t);
  }
  std::vector<Triple> out;
  out.reserve(g.triples().size());
  for (const std::string& head : head_order)
    for (const Triple* t : groups.at(head)) out.push_back(*t);
  return KnowledgeGraph(std::move(out));
}

}  // namespace mgsa
