// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_GRAPH_STRUCTURE_HPP_
#define MGSA_GRAPH_STRUCTURE_HPP_

#include <string>
#include <vector>

#include "mgsa/kg.hpp"
#include "mgsa/linearize.hpp"
#include "mgsa/tensor.hpp"

namespace mgsa {

// Entity-level relative position labels (entries of the m x m matrix rel_e).
// ENT_ENT marks entities sharing an incident relation occurrence; ENT_REL /
// REL_ENT mark incidence, with direction carried by pair order.
namespace entity_label {
constexpr int kNone = 0;
constexpr int kEntEnt = 1;
constexpr int kEntRel = 2;
constexpr int kRelEnt = 3;
constexpr int kSelf = 4;
constexpr int kCount = 5;
}  // namespace entity_label

const char* entity_label_name(int label);

// Word-level labels are flattened to dense ids so a bias table can index
// them: SELF, UNREACHABLE, then FWD(1..D), BWD(1..D), SAME_FWD(1..P),
// SAME_BWD(1..P). Magnitudes clamp to the configured maxima.
namespace word_label {
constexpr int kSelf = 0;
constexpr int kUnreachable = 1;

int fwd(int d, int d_clip);
int bwd(int d, int d_clip);
int same_fwd(int p, int d_clip, int p_clip);
int same_bwd(int p, int d_clip, int p_clip);
constexpr int count(int d_clip, int p_clip) { return 2 + 2 * d_clip + 2 * p_clip; }
}  // namespace word_label

std::string word_label_name(int label, int d_clip, int p_clip);

// Bipartite view of a knowledge graph: entity units on one side, one
// relation unit per triple on the other, with stored orientation
// head -> relation -> tail. Unit indices are those of the KnowledgeGraph.
struct BipartiteGraph {
  int entity_count = 0;
  int relation_count = 0;
  // Incidences per triple t: (head_unit[t], rel_unit[t]) and
  // (rel_unit[t], tail_unit[t]).
  std::vector<int> head_unit;
  std::vector<int> rel_unit;
  std::vector<int> tail_unit;

  int unit_count() const { return entity_count + relation_count; }
  bool is_entity(int unit) const { return unit < entity_count; }
};

BipartiteGraph build_bipartite(const KnowledgeGraph& g);

// m x m entity label matrix: diagonal SELF; incident (entity, relation)
// pairs ENT_REL / REL_ENT by order; entities sharing a relation occurrence
// ENT_ENT; everything else NONE.
IntMatrix rel_pos_entity(const BipartiteGraph& b);

// m x m 0/1 matrix: symmetric bipartite incidence plus unit diagonal.
IntMatrix adjacency(const BipartiteGraph& b);

// Directed word-level graph: per triple, a complete bipartite edge set from
// the head occurrence's word nodes to the relation occurrence's, and from
// the relation occurrence's to the tail occurrence's. No intra-unit edges.
struct WordGraph {
  int node_count = 0;
  std::vector<std::vector<int>> out_edges;  // sorted ascending per node
};

WordGraph build_word_graph(const KnowledgeGraph& g, const WordLinearization& wl);

// Unreachable-pair sentinel in shortest-path tables.
constexpr int kInfiniteDistance = -1;

// All-pairs BFS over unit-weight directed edges; dist(i, i) = 0.
IntMatrix shortest_paths(const WordGraph& wg);

// w x w word label matrix per the case order: SELF on the diagonal;
// same-occurrence pairs SAME_FWD(p) / SAME_BWD(-p) with p = offset(j) -
// offset(i); both directions unreachable -> UNREACHABLE; dist(i,j) <=
// dist(j,i) -> FWD(dist(i,j)); otherwise BWD(dist(j,i)).
IntMatrix rel_pos_word(const IntMatrix& dist, const std::vector<WordNode>& nodes, int d_clip,
                       int p_clip);

// Expands word-node labels to token resolution: every token inherits its
// word node's labels, so intra-node token pairs land on the SELF diagonal.
IntMatrix expand_word_labels_to_tokens(const IntMatrix& node_labels,
                                       const std::vector<int>& token_node);

struct StructureMatrices {
  IntMatrix rel_e;  // m x m entity labels
  IntMatrix adj;    // m x m adjacency
  IntMatrix rel_w;  // w x w word labels (word-node resolution)
};

StructureMatrices build_structure(const KnowledgeGraph& g, const WordLinearization& wl,
                                  int d_clip, int p_clip);

}  // namespace mgsa

#endif  // MGSA_GRAPH_STRUCTURE_HPP_
