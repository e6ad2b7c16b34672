// SPDX-License-Identifier: Apache-2.0
#include "mgsa/graph_structure.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

#include "mgsa/threading.hpp"

namespace mgsa {

const char* entity_label_name(int label) {
  switch (label) {
    case entity_label::kNone: return "NONE";
    case entity_label::kEntEnt: return "ENT_ENT";
    case entity_label::kEntRel: return "ENT_REL";
    case entity_label::kRelEnt: return "REL_ENT";
    case entity_label::kSelf: return "SELF";
    default: throw std::out_of_range("entity_label_name: bad label " + std::to_string(label));
  }
}

namespace word_label {

namespace {
int clamp_magnitude(int x, int clip, const char* what) {
  if (x < 1) throw std::out_of_range(std::string(what) + " magnitude must be >= 1");
  return std::min(x, clip);
}
}  // namespace

int fwd(int d, int d_clip) { return 2 + clamp_magnitude(d, d_clip, "fwd") - 1; }

int bwd(int d, int d_clip) { return 2 + d_clip + clamp_magnitude(d, d_clip, "bwd") - 1; }

int same_fwd(int p, int d_clip, int p_clip) {
  return 2 + 2 * d_clip + clamp_magnitude(p, p_clip, "same_fwd") - 1;
}

int same_bwd(int p, int d_clip, int p_clip) {
  return 2 + 2 * d_clip + p_clip + clamp_magnitude(p, p_clip, "same_bwd") - 1;
}

}  // namespace word_label

std::string word_label_name(int label, int d_clip, int p_clip) {
  if (label == word_label::kSelf) return "SELF";
  if (label == word_label::kUnreachable) return "UNREACHABLE";
  int x = label - 2;
  if (x < d_clip) return "FWD(" + std::to_string(x + 1) + ")";
  x -= d_clip;
  if (x < d_clip) return "BWD(" + std::to_string(x + 1) + ")";
  x -= d_clip;
  if (x < p_clip) return "SAME_FWD(" + std::to_string(x + 1) + ")";
  x -= p_clip;
  if (x < p_clip) return "SAME_BWD(" + std::to_string(x + 1) + ")";
  throw std::out_of_range("word_label_name: bad label " + std::to_string(label));
}

BipartiteGraph build_bipartite(const KnowledgeGraph& g) {
  BipartiteGraph b;
  b.entity_count = g.entity_count();
  b.relation_count = g.relation_count();
  for (int t = 0; t < g.relation_count(); ++t) {
    b.head_unit.push_back(g.head_unit(t));
    b.rel_unit.push_back(g.relation_unit(t));
    b.tail_unit.push_back(g.tail_unit(t));
  }
  return b;
}

IntMatrix rel_pos_entity(const BipartiteGraph& b) {
  const int m = b.unit_count();
  IntMatrix r(m, m, entity_label::kNone);
  for (int i = 0; i < m; ++i) r.at(i, i) = entity_label::kSelf;
  for (size_t t = 0; t < b.rel_unit.size(); ++t) {
    const int h = b.head_unit[t];
    const int rl = b.rel_unit[t];
    const int tl = b.tail_unit[t];
    r.at(h, rl) = entity_label::kEntRel;
    r.at(rl, h) = entity_label::kRelEnt;
    r.at(tl, rl) = entity_label::kEntRel;
    r.at(rl, tl) = entity_label::kRelEnt;
    if (h != tl) {
      r.at(h, tl) = entity_label::kEntEnt;
      r.at(tl, h) = entity_label::kEntEnt;
    }
  }
  return r;
}

IntMatrix adjacency(const BipartiteGraph& b) {
  const int m = b.unit_count();
  IntMatrix a(m, m, 0);
  for (int i = 0; i < m; ++i) a.at(i, i) = 1;
  for (size_t t = 0; t < b.rel_unit.size(); ++t) {
    const int h = b.head_unit[t];
    const int rl = b.rel_unit[t];
    const int tl = b.tail_unit[t];
    a.at(h, rl) = a.at(rl, h) = 1;
    a.at(rl, tl) = a.at(tl, rl) = 1;
  }
  return a;
}

WordGraph build_word_graph(const KnowledgeGraph& g, const WordLinearization& wl) {
  const int triple_count = static_cast<int>(g.triples().size());
  // Word nodes of each occurrence, keyed by (triple, role), in node order.
  std::vector<std::vector<int>> occ(static_cast<size_t>(triple_count) * 3);
  for (size_t n = 0; n < wl.nodes.size(); ++n) {
    const WordNode& wn = wl.nodes[n];
    if (wn.triple < 0 || wn.triple >= triple_count)
      throw std::invalid_argument("build_word_graph: node " + std::to_string(n) +
                                  " references triple " + std::to_string(wn.triple));
    occ[static_cast<size_t>(wn.triple) * 3 + static_cast<size_t>(wn.role)].push_back(
        static_cast<int>(n));
  }
  WordGraph wg;
  wg.node_count = static_cast<int>(wl.nodes.size());
  wg.out_edges.assign(wl.nodes.size(), {});
  for (int t = 0; t < triple_count; ++t) {
    const auto& head = occ[static_cast<size_t>(t) * 3 + 0];
    const auto& rel = occ[static_cast<size_t>(t) * 3 + 1];
    const auto& tail = occ[static_cast<size_t>(t) * 3 + 2];
    if (static_cast<int>(wl.triples_kept) <= t) continue;
    for (int h : head)
      for (int r : rel) wg.out_edges[static_cast<size_t>(h)].push_back(r);
    for (int r : rel)
      for (int tl : tail) wg.out_edges[static_cast<size_t>(r)].push_back(tl);
  }
  for (auto& edges : wg.out_edges) std::sort(edges.begin(), edges.end());
  return wg;
}

IntMatrix shortest_paths(const WordGraph& wg) {
  const int w = wg.node_count;
  IntMatrix dist(w, w, kInfiniteDistance);
  parallel_for(w, [&](int src) {
    dist.at(src, src) = 0;
    std::deque<int> queue{src};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      const int du = dist.at(src, u);
      for (int v : wg.out_edges[static_cast<size_t>(u)]) {
        if (dist.at(src, v) != kInfiniteDistance) continue;
        dist.at(src, v) = du + 1;
        queue.push_back(v);
      }
    }
  });
  return dist;
}

IntMatrix rel_pos_word(const IntMatrix& dist, const std::vector<WordNode>& nodes, int d_clip,
                       int p_clip) {
  const int w = static_cast<int>(nodes.size());
  if (dist.rows != w || dist.cols != w)
    throw std::invalid_argument("rel_pos_word: distance table is " + std::to_string(dist.rows) +
                                "x" + std::to_string(dist.cols) + " for " + std::to_string(w) +
                                " nodes");
  IntMatrix r(w, w, word_label::kUnreachable);
  for (int i = 0; i < w; ++i) {
    for (int j = 0; j < w; ++j) {
      if (i == j) {
        r.at(i, j) = word_label::kSelf;
        continue;
      }
      const WordNode& ni = nodes[static_cast<size_t>(i)];
      const WordNode& nj = nodes[static_cast<size_t>(j)];
      if (ni.triple == nj.triple && ni.role == nj.role) {
        const int p = nj.offset - ni.offset;
        r.at(i, j) = p > 0 ? word_label::same_fwd(p, d_clip, p_clip)
                           : word_label::same_bwd(-p, d_clip, p_clip);
        continue;
      }
      const int fwd = dist.at(i, j);
      const int bwd = dist.at(j, i);
      if (fwd == kInfiniteDistance && bwd == kInfiniteDistance) {
        r.at(i, j) = word_label::kUnreachable;
      } else if (fwd != kInfiniteDistance && (bwd == kInfiniteDistance || fwd <= bwd)) {
        r.at(i, j) = word_label::fwd(fwd, d_clip);
      } else {
        r.at(i, j) = word_label::bwd(bwd, d_clip);
      }
    }
  }
  return r;
}

IntMatrix expand_word_labels_to_tokens(const IntMatrix& node_labels,
                                       const std::vector<int>& token_node) {
  const int n = static_cast<int>(token_node.size());
  IntMatrix r(n, n, word_label::kSelf);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      r.at(a, b) = node_labels.at(token_node[static_cast<size_t>(a)],
                                  token_node[static_cast<size_t>(b)]);
  return r;
}

StructureMatrices build_structure(const KnowledgeGraph& g, const WordLinearization& wl,
                                  int d_clip, int p_clip) {
  const BipartiteGraph b = build_bipartite(g);
  StructureMatrices sm;
  sm.rel_e = rel_pos_entity(b);
  sm.adj = adjacency(b);
  sm.rel_w = rel_pos_word(shortest_paths(build_word_graph(g, wl)), wl.nodes, d_clip, p_clip);
  return sm;
}

}  // namespace mgsa
