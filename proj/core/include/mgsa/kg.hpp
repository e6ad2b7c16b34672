// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_KG_HPP_
#define MGSA_KG_HPP_

#include <string>
#include <unordered_map>
#include <vector>

namespace mgsa {

struct Triple {
  std::string head;
  std::string relation;
  std::string tail;
};

// A knowledge graph plus its canonical unit indexing. Entities are
// deduplicated by exact label (first-appearance order, head before tail
// within a triple); relations get one node per triple occurrence. Units are
// indexed entities first, then relations — every matrix builder and span map
// shares this order.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  // Trims surrounding whitespace from every component and validates that each
  // contains at least one word. Throws std::invalid_argument otherwise.
  explicit KnowledgeGraph(std::vector<Triple> triples);

  const std::vector<Triple>& triples() const { return triples_; }
  const std::vector<std::string>& entity_nodes() const { return entities_; }
  const std::vector<std::string>& relation_nodes() const { return relations_; }

  int entity_count() const { return static_cast<int>(entities_.size()); }
  int relation_count() const { return static_cast<int>(relations_.size()); }
  int unit_count() const { return entity_count() + relation_count(); }

  // Unit indices (0..m-1) for a triple's three nodes.
  int head_unit(int t) const { return head_units_[static_cast<size_t>(t)]; }
  int tail_unit(int t) const { return tail_units_[static_cast<size_t>(t)]; }
  int relation_unit(int t) const { return entity_count() + t; }

  int entity_unit(const std::string& label) const;  // throws if unknown

 private:
  std::vector<Triple> triples_;
  std::vector<std::string> entities_;
  std::vector<std::string> relations_;
  std::unordered_map<std::string, int> entity_index_;
  std::vector<int> head_units_;
  std::vector<int> tail_units_;
};

struct Example {
  KnowledgeGraph graph;
  std::vector<std::string> references;  // at least one, each non-empty
};

struct Corpus {
  std::vector<Example> examples;  // file order
  std::string split;              // train / valid / test tag
};

// Reads a JSON-Lines corpus: one object per line with "triples"
// ([[head, relation, tail], ...]) and "text" ([reference, ...]).
// Malformed lines raise std::runtime_error naming the 1-based line number;
// invalid triples raise std::invalid_argument identifying the triple.
Corpus parse_corpus(const std::string& path, const std::string& split);

// Stable head-entity clustering: triples sharing a head become contiguous,
// groups ordered by first appearance of the head, original order kept within
// a group.
KnowledgeGraph cluster_by_head(const KnowledgeGraph& g);

}  // namespace mgsa

#endif  // MGSA_KG_HPP_
