#include "depagg/edge_matrix.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace depagg {

EdgeUnion build_edge_union(const ParseEnsemble& ensemble) {
  EdgeUnion out;
  out.offsets.reserve(ensemble.num_sentences() + 1);
  out.offsets.push_back(0);
  std::vector<Edge> local;
  for (std::size_t i = 0; i < ensemble.num_sentences(); ++i) {
    local.clear();
    for (const DepTree& t : ensemble.trees(i)) {
      const auto e = edges_of(t);
      local.insert(local.end(), e.begin(), e.end());
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    for (const Edge& e : local) out.edges.push_back({i, e.head, e.dependent});
    out.offsets.push_back(out.edges.size());
  }
  return out;
}

EdgeLabelMatrix::EdgeLabelMatrix(std::size_t cols, std::vector<Label> labels)
    : cols_(cols), labels_(std::move(labels)) {
  if (cols_ == 0 && !labels_.empty()) throw std::invalid_argument("label matrix needs columns");
  if (cols_ != 0 && labels_.size() % cols_ != 0) {
    throw std::invalid_argument("label matrix size is not a multiple of the column count");
  }
  for (Label l : labels_) {
    if (l != 1 && l != -1) throw std::invalid_argument("labels must be -1 or +1");
  }
  for (std::size_t j = 0; j < cols_; ++j) parser_ids_.push_back("L" + std::to_string(j + 1));
}

EdgeLabelMatrix::EdgeLabelMatrix(std::vector<std::string> parser_ids, EdgeUnion edges,
                                 std::vector<Label> labels)
    : EdgeLabelMatrix(parser_ids.size(), std::move(labels)) {
  parser_ids_ = std::move(parser_ids);
  edges_ = std::move(edges);
  if (!edges_.edges.empty() && edges_.edges.size() != rows()) {
    throw std::invalid_argument("label matrix rows do not match the edge list");
  }
}

std::vector<Label> EdgeLabelMatrix::column(std::size_t j) const {
  std::vector<Label> out(rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = at(r, j);
  return out;
}

EdgeLabelMatrix EdgeLabelMatrix::select_columns(std::span<const std::size_t> keep) const {
  std::vector<std::string> ids;
  for (std::size_t j : keep) ids.push_back(parser_ids_.at(j));
  std::vector<Label> labels;
  labels.reserve(rows() * keep.size());
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t j : keep) labels.push_back(at(r, j));
  }
  return with_labels(std::move(ids), keep.size(), std::move(labels));
}

EdgeLabelMatrix EdgeLabelMatrix::with_labels(std::vector<std::string> parser_ids, std::size_t cols,
                                             std::vector<Label> labels) const {
  EdgeLabelMatrix out(cols, std::move(labels));
  if (out.rows() != rows()) throw std::invalid_argument("replacement labels change the row count");
  out.parser_ids_ = std::move(parser_ids);
  out.edges_ = edges_;
  return out;
}

EdgeLabelMatrix label_matrix(const ParseEnsemble& ensemble, const EdgeUnion& edges) {
  if (edges.num_sentences() != ensemble.num_sentences()) {
    throw std::invalid_argument("edge union was built from a different ensemble");
  }
  const std::size_t m = ensemble.num_parsers();
  std::vector<Label> labels(edges.edges.size() * m, Label{-1});
  for (std::size_t r = 0; r < edges.edges.size(); ++r) {
    const CandidateEdge& e = edges.edges[r];
    for (std::size_t j = 0; j < m; ++j) {
      if (ensemble.tree(e.sentence, j).head(e.dependent) == e.head) labels[r * m + j] = 1;
    }
  }
  return EdgeLabelMatrix(ensemble.parser_ids(), edges, std::move(labels));
}

int positive_votes(const EdgeLabelMatrix& matrix, std::size_t r) {
  int n = 0;
  for (Label l : matrix.row(r)) n += l > 0;
  return n;
}

std::vector<Label> majority_vote(const EdgeLabelMatrix& matrix) {
  std::vector<Label> out(matrix.rows());
  for (std::size_t r = 0; r < out.size(); ++r) {
    int sum = 0;
    for (Label l : matrix.row(r)) sum += l;
    out[r] = sum >= 0 ? Label{1} : Label{-1};
  }
  return out;
}

void dump_edges(std::ostream& out, const EdgeLabelMatrix& matrix, const ParseEnsemble& ensemble) {
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const CandidateEdge& e = matrix.edge(r);
    out << ensemble.sentence(e.sentence).sentence_id << '\t' << e.head << '\t' << e.dependent;
    for (Label l : matrix.row(r)) out << '\t' << (l > 0 ? "+1" : "-1");
    out << '\n';
  }
}

}  // namespace depagg
