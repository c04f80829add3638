#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace depagg {

// Column layout of a CoNLL-U word line. HEAD is the only column this library
// rewrites; the rest travel with the token untouched.
enum class Column : std::size_t {
  kId = 0,
  kForm,
  kLemma,
  kUpos,
  kXpos,
  kFeats,
  kHead,
  kDeprel,
  kDeps,
  kMisc,
};
inline constexpr std::size_t kNumColumns = 10;

struct Token {
  int index = 0;  // 1-based
  std::string form;
  // Raw text of all ten columns as read. The HEAD text is written back only
  // when the output head equals the head read.
  std::array<std::string, kNumColumns> columns;
  int head = 0;  // HEAD as read
  bool carriage_return = false;

  const std::string& column(Column c) const { return columns[static_cast<std::size_t>(c)]; }
};

// A line of the sentence block in file order. Word lines point at a token;
// everything else (comments, multiword ranges, empty nodes) is kept verbatim.
struct BlockLine {
  enum class Kind { kComment, kRange, kEmptyNode, kWord };
  Kind kind = Kind::kComment;
  std::string raw;        // verbatim line text without '\n', for non-word lines
  std::size_t token = 0;  // index into Sentence::tokens for kWord
};

struct Sentence {
  std::string sentence_id;
  std::vector<Token> tokens;
  std::vector<std::string> comments;
  std::vector<BlockLine> layout;
  // Blank line(s) that terminated the block, verbatim. Empty at EOF without
  // a trailing blank line.
  std::vector<std::string> terminators;

  std::size_t size() const { return tokens.size(); }
};

enum class TreeDefect { kNone, kWrongLength, kOutOfRange, kSelfLoop, kCycle, kUnreachable };

std::string_view to_string(TreeDefect d);

struct TreeVerdict {
  TreeDefect defect = TreeDefect::kNone;
  int token = 0;  // first offending token (1-based), 0 when valid

  bool ok() const { return defect == TreeDefect::kNone; }
  std::string message() const;
};

/// Checks that `heads` (heads[d-1] is the head of token d, 0 = root) forms a
/// tree over {0..q} rooted at 0. Reports the first violation found while
/// scanning tokens in order: out-of-range and self-loops first, then cycles,
/// then nodes that cannot reach the root.
TreeVerdict validate_tree(std::span<const int> heads, std::size_t q);

class InvalidTree : public std::invalid_argument {
 public:
  explicit InvalidTree(const TreeVerdict& v);
  const TreeVerdict& verdict() const { return verdict_; }

 private:
  TreeVerdict verdict_;
};

struct Edge {
  int head = 0;
  int dependent = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// A validated head assignment. Construction throws InvalidTree.
class DepTree {
 public:
  DepTree() = default;
  explicit DepTree(std::vector<int> heads);

  std::size_t size() const { return heads_.size(); }
  int head(int dependent) const { return heads_[static_cast<std::size_t>(dependent - 1)]; }
  std::span<const int> heads() const { return heads_; }

  friend bool operator==(const DepTree&, const DepTree&) = default;

 private:
  std::vector<int> heads_;
};

/// Edges (heads[d], d) ordered by dependent.
std::vector<Edge> edges_of(const DepTree& tree);

/// Inverse of edges_of. Throws InvalidTree if the edges do not give every
/// token of a q-token sentence exactly one head forming a tree.
DepTree tree_from_edges(std::span<const Edge> edges, std::size_t q);

// m parsers' trees over a shared sequence of sentences. Sentence metadata
// (ids, forms) is taken from a reference file.
class ParseEnsemble {
 public:
  ParseEnsemble() = default;
  /// trees[i][j] = parser j's tree for sentence i. Throws std::invalid_argument
  /// when counts disagree.
  ParseEnsemble(std::vector<std::string> parser_ids, std::vector<Sentence> sentences,
                std::vector<std::vector<DepTree>> trees);

  std::size_t num_parsers() const { return parser_ids_.size(); }
  std::size_t num_sentences() const { return sentences_.size(); }
  const std::vector<std::string>& parser_ids() const { return parser_ids_; }
  const Sentence& sentence(std::size_t i) const { return sentences_[i]; }
  const std::vector<Sentence>& sentences() const { return sentences_; }
  std::span<const DepTree> trees(std::size_t i) const { return trees_[i]; }
  const DepTree& tree(std::size_t i, std::size_t j) const { return trees_[i][j]; }

  /// Parser j's trees across all sentences.
  std::vector<DepTree> column(std::size_t j) const;

  /// Keeps only the listed parsers, in the given order.
  ParseEnsemble select_parsers(std::span<const std::size_t> keep) const;
  /// Keeps only the listed sentences, in the given order.
  ParseEnsemble select_sentences(std::span<const std::size_t> keep) const;

 private:
  std::vector<std::string> parser_ids_;
  std::vector<Sentence> sentences_;
  std::vector<std::vector<DepTree>> trees_;
};

/// Appends the sentences of several ensembles that share one parser list.
/// Used to pool parameter estimation across treebanks.
ParseEnsemble concat_ensembles(std::span<const ParseEnsemble> parts);

}  // namespace depagg
