#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "depagg/edge_matrix.hpp"
#include "depagg/tree.hpp"

namespace depagg {

struct WeightedEdge {
  int head = 0;
  int dependent = 0;
  double weight = 0.0;
};

// Candidate edges of one sentence over nodes {0 (root), 1..q}.
struct WeightedTokenGraph {
  std::string sentence_id;
  std::size_t q = 0;
  std::vector<WeightedEdge> edges;
};

class NoArborescence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Maximum spanning arborescence rooted at 0 (Chu-Liu/Edmonds).
///
/// With `single_root`, exactly one edge leaves node 0: the problem is solved
/// once per candidate root edge with the other root edges removed and the best
/// solution is kept. Among optimal trees (equal up to a relative 1e-12) the one
/// with the lexicographically smallest head sequence is returned; this is found
/// by fixing heads token by token and re-solving under the prefix constraint.
/// Parallel edges keep their largest weight. Throws NoArborescence when no
/// spanning arborescence exists.
DepTree max_arborescence(const WeightedTokenGraph& graph, bool single_root = true);

/// Exhaustive search over head assignments with the same objective and tie
/// rule as max_arborescence. Throws std::invalid_argument for q > 8.
DepTree brute_force_arborescence(const WeightedTokenGraph& graph, bool single_root = true);

/// Sum of edge weights of `tree` in dependent order. Throws
/// std::invalid_argument if the tree uses an edge absent from the graph.
double tree_weight(const WeightedTokenGraph& graph, const DepTree& tree);

/// Sentence i's candidate edges with row scores, as a token graph.
WeightedTokenGraph sentence_graph(const EdgeUnion& edges, std::size_t i, std::span<const double> scores);

/// max_arborescence over every sentence of `edges`, edge weights taken from
/// `scores` (one per row of the union).
std::vector<DepTree> decode_sentences(const EdgeUnion& edges, std::span<const double> scores,
                                      bool single_root = true);

}  // namespace depagg
