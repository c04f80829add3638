#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "depagg/tree.hpp"

namespace depagg {

using Label = std::int8_t;  // -1 or +1

struct CandidateEdge {
  std::size_t sentence = 0;
  int head = 0;
  int dependent = 0;

  friend auto operator<=>(const CandidateEdge&, const CandidateEdge&) = default;
};

// Union of all parsers' edges, per sentence and globally. Edges are ordered
// by (sentence, head, dependent); sentence i owns rows
// [offsets[i], offsets[i+1]).
struct EdgeUnion {
  std::vector<CandidateEdge> edges;
  std::vector<std::size_t> offsets;

  std::size_t num_sentences() const { return offsets.empty() ? 0 : offsets.size() - 1; }
  std::span<const CandidateEdge> sentence_edges(std::size_t i) const {
    return std::span(edges).subspan(offsets[i], offsets[i + 1] - offsets[i]);
  }
};

EdgeUnion build_edge_union(const ParseEnsemble& ensemble);

// Row-major {-1,+1} matrix: one row per candidate edge, one column per
// labeling source (parser). May also be built bare, without edge metadata,
// for estimation code that only needs the labels.
class EdgeLabelMatrix {
 public:
  EdgeLabelMatrix() = default;
  /// Bare matrix. Throws std::invalid_argument on a ragged size or a label
  /// outside {-1,+1}.
  EdgeLabelMatrix(std::size_t cols, std::vector<Label> labels);
  EdgeLabelMatrix(std::vector<std::string> parser_ids, EdgeUnion edges, std::vector<Label> labels);

  std::size_t rows() const { return cols_ == 0 ? 0 : labels_.size() / cols_; }
  std::size_t cols() const { return cols_; }
  Label at(std::size_t r, std::size_t j) const { return labels_[r * cols_ + j]; }
  std::span<const Label> row(std::size_t r) const {
    return std::span(labels_).subspan(r * cols_, cols_);
  }
  std::span<const Label> data() const { return labels_; }
  std::vector<Label> column(std::size_t j) const;

  const std::vector<std::string>& parser_ids() const { return parser_ids_; }
  bool has_edges() const { return !edges_.edges.empty(); }
  const EdgeUnion& edge_union() const { return edges_; }
  const CandidateEdge& edge(std::size_t r) const { return edges_.edges[r]; }

  /// Same rows and edges, columns restricted/reordered to `keep`.
  EdgeLabelMatrix select_columns(std::span<const std::size_t> keep) const;
  /// Same edges with a replacement label block of the given width.
  EdgeLabelMatrix with_labels(std::vector<std::string> parser_ids, std::size_t cols,
                              std::vector<Label> labels) const;

 private:
  std::size_t cols_ = 0;
  std::vector<std::string> parser_ids_;
  EdgeUnion edges_;
  std::vector<Label> labels_;
};

/// labels[e][j] = +1 iff parser j's tree contains edge e, else -1.
EdgeLabelMatrix label_matrix(const ParseEnsemble& ensemble, const EdgeUnion& edges);
inline EdgeLabelMatrix label_matrix(const ParseEnsemble& ensemble) {
  return label_matrix(ensemble, build_edge_union(ensemble));
}

/// Sign of each row sum; a zero sum gives +1.
std::vector<Label> majority_vote(const EdgeLabelMatrix& matrix);

/// Number of +1 labels in row r.
int positive_votes(const EdgeLabelMatrix& matrix, std::size_t r);

/// Debug listing: "sentence_id TAB head TAB dependent TAB votes..." per row.
void dump_edges(std::ostream& out, const EdgeLabelMatrix& matrix, const ParseEnsemble& ensemble);

}  // namespace depagg
