// SPDX-License-Identifier: Apache-2.0
#ifndef MGSA_LINEARIZE_HPP_
#define MGSA_LINEARIZE_HPP_

#include <vector>

#include "mgsa/kg.hpp"
#include "mgsa/vocab.hpp"

namespace mgsa {

// Unit assignment of marker tokens (<H>, <R>, <T>, [N]): they belong to no
// unit and are excluded from pooling.
inline constexpr int kMarkerUnit = -1;

// Entity-level linearization: per triple, <H> head-words <R> relation-words
// <T> tail-words. token_unit aligns every token to a unit of the *input*
// graph (markers map to kMarkerUnit). When the sequence would exceed the
// max length, whole trailing triples are dropped and triples_kept records
// how many survive; unit indices still refer to the input graph, so callers
// that truncate should re-linearize a graph cut to triples_kept (see
// fit_to_max_len).
struct EntityLinearization {
  std::vector<int> token_ids;
  std::vector<int> token_unit;
  int triples_kept = 0;
};

// One word node: a [N] marker plus its word token. Occurrences are keyed by
// (triple, role); word nodes of the same occurrence share unit/triple/role
// and differ in offset.
struct WordNode {
  int unit = 0;    // owning unit index (entity or relation unit)
  int offset = 0;  // 0-based word position within this occurrence
  int triple = 0;  // triple occurrence index
  int role = 0;    // 0 = head, 1 = relation, 2 = tail
};

// Word-level linearization: per triple, per role, per word emit [N] then the
// word. token_node maps every token (marker and word alike) to its word-node
// id; nodes lists word nodes in sequence order, so ids are contiguous 0..w-1.
struct WordLinearization {
  std::vector<int> token_ids;
  std::vector<int> token_node;
  std::vector<WordNode> nodes;
  int triples_kept = 0;
};

// Both throw std::invalid_argument when even the first triple exceeds
// max_len (no valid sequence exists).
EntityLinearization linearize_entity_level(const KnowledgeGraph& g, const Vocab& v, int max_len);
WordLinearization linearize_word_level(const KnowledgeGraph& g, const Vocab& v, int max_len);

// Largest prefix of g's triples whose entity-level AND word-level sequences
// both fit in max_len, returned as a graph with consistent unit indexing.
// Throws std::invalid_argument if not even the first triple fits.
KnowledgeGraph fit_to_max_len(const KnowledgeGraph& g, int max_len);

// Token lengths of single triples under each linearization.
int entity_level_len(const Triple& t);
int word_level_len(const Triple& t);

// Parses an entity-level token sequence back into triples (round-trip check
// and CLI debugging). Throws std::invalid_argument on a malformed sequence.
std::vector<Triple> reparse_entity_sequence(const std::vector<int>& token_ids, const Vocab& v);

}  // namespace mgsa

#endif  // MGSA_LINEARIZE_HPP_
