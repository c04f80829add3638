#include "depagg/tree.hpp"

#include <sstream>

namespace depagg {

std::string_view to_string(TreeDefect d) {
  switch (d) {
    case TreeDefect::kNone: return "valid";
    case TreeDefect::kWrongLength: return "wrong length";
    case TreeDefect::kOutOfRange: return "out-of-range";
    case TreeDefect::kSelfLoop: return "self-loop";
    case TreeDefect::kCycle: return "cycle";
    case TreeDefect::kUnreachable: return "unreachable";
  }
  return "unknown";
}

std::string TreeVerdict::message() const {
  if (ok()) return "valid";
  std::ostringstream os;
  os << to_string(defect);
  if (token > 0) os << " at token " << token;
  return os.str();
}

TreeVerdict validate_tree(std::span<const int> heads, std::size_t q) {
  if (heads.size() != q) return {TreeDefect::kWrongLength, 0};
  const int n = static_cast<int>(q);
  for (int d = 1; d <= n; ++d) {
    const int h = heads[static_cast<std::size_t>(d - 1)];
    if (h < 0 || h > n) return {TreeDefect::kOutOfRange, d};
    if (h == d) return {TreeDefect::kSelfLoop, d};
  }
  // 0 = unvisited, 1 = on the current walk, 2 = known to reach the root.
  std::vector<char> state(q + 1, 0);
  state[0] = 2;
  std::vector<int> walk;
  for (int d = 1; d <= n; ++d) {
    walk.clear();
    int v = d;
    while (state[static_cast<std::size_t>(v)] == 0) {
      state[static_cast<std::size_t>(v)] = 1;
      walk.push_back(v);
      v = heads[static_cast<std::size_t>(v - 1)];
    }
    if (state[static_cast<std::size_t>(v)] == 1) return {TreeDefect::kCycle, v};
    for (int w : walk) state[static_cast<std::size_t>(w)] = 2;
  }
  return {};
}

InvalidTree::InvalidTree(const TreeVerdict& v)
    : std::invalid_argument("invalid dependency tree: " + v.message()), verdict_(v) {}

DepTree::DepTree(std::vector<int> heads) : heads_(std::move(heads)) {
  const auto verdict = validate_tree(heads_, heads_.size());
  if (!verdict.ok()) throw InvalidTree(verdict);
}

std::vector<Edge> edges_of(const DepTree& tree) {
  std::vector<Edge> edges;
  edges.reserve(tree.size());
  for (std::size_t d = 0; d < tree.size(); ++d) {
    edges.push_back({tree.heads()[d], static_cast<int>(d + 1)});
  }
  return edges;
}

DepTree tree_from_edges(std::span<const Edge> edges, std::size_t q) {
  std::vector<int> heads(q, -1);
  for (const Edge& e : edges) {
    if (e.dependent < 1 || static_cast<std::size_t>(e.dependent) > q) {
      throw InvalidTree({TreeDefect::kOutOfRange, e.dependent});
    }
    int& slot = heads[static_cast<std::size_t>(e.dependent - 1)];
    if (slot != -1) throw InvalidTree({TreeDefect::kWrongLength, e.dependent});
    slot = e.head;
  }
  for (std::size_t d = 0; d < q; ++d) {
    if (heads[d] == -1) throw InvalidTree({TreeDefect::kUnreachable, static_cast<int>(d + 1)});
  }
  return DepTree(std::move(heads));
}

ParseEnsemble::ParseEnsemble(std::vector<std::string> parser_ids, std::vector<Sentence> sentences,
                             std::vector<std::vector<DepTree>> trees)
    : parser_ids_(std::move(parser_ids)), sentences_(std::move(sentences)), trees_(std::move(trees)) {
  if (trees_.size() != sentences_.size()) {
    throw std::invalid_argument("ensemble: tree rows do not match sentence count");
  }
  for (std::size_t i = 0; i < trees_.size(); ++i) {
    if (trees_[i].size() != parser_ids_.size()) {
      throw std::invalid_argument("ensemble: sentence " + std::to_string(i) +
                                  " does not have one tree per parser");
    }
    for (const DepTree& t : trees_[i]) {
      if (t.size() != sentences_[i].size()) {
        throw std::invalid_argument("ensemble: token count mismatch in sentence " +
                                    sentences_[i].sentence_id);
      }
    }
  }
}

std::vector<DepTree> ParseEnsemble::column(std::size_t j) const {
  std::vector<DepTree> out;
  out.reserve(trees_.size());
  for (const auto& row : trees_) out.push_back(row[j]);
  return out;
}

ParseEnsemble ParseEnsemble::select_parsers(std::span<const std::size_t> keep) const {
  std::vector<std::string> ids;
  for (std::size_t j : keep) ids.push_back(parser_ids_.at(j));
  std::vector<std::vector<DepTree>> trees;
  trees.reserve(trees_.size());
  for (const auto& row : trees_) {
    std::vector<DepTree> r;
    for (std::size_t j : keep) r.push_back(row[j]);
    trees.push_back(std::move(r));
  }
  return ParseEnsemble(std::move(ids), sentences_, std::move(trees));
}

ParseEnsemble ParseEnsemble::select_sentences(std::span<const std::size_t> keep) const {
  std::vector<Sentence> sents;
  std::vector<std::vector<DepTree>> trees;
  for (std::size_t i : keep) {
    sents.push_back(sentences_.at(i));
    trees.push_back(trees_.at(i));
  }
  return ParseEnsemble(parser_ids_, std::move(sents), std::move(trees));
}

ParseEnsemble concat_ensembles(std::span<const ParseEnsemble> parts) {
  if (parts.empty()) return {};
  std::vector<Sentence> sents;
  std::vector<std::vector<DepTree>> trees;
  for (const auto& p : parts) {
    if (p.parser_ids() != parts.front().parser_ids()) {
      throw std::invalid_argument("cannot pool ensembles with different parser lists");
    }
    for (std::size_t i = 0; i < p.num_sentences(); ++i) {
      sents.push_back(p.sentence(i));
      auto row = p.trees(i);
      trees.emplace_back(row.begin(), row.end());
    }
  }
  return ParseEnsemble(parts.front().parser_ids(), std::move(sents), std::move(trees));
}

}  // namespace depagg
