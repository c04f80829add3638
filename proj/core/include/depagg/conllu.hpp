#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "depagg/tree.hpp"

namespace depagg {

class ConlluError : public std::runtime_error {
 public:
  ConlluError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// One CoNLL-U file: sentences in input order plus their HEAD trees.
struct TreebankFile {
  std::string parser_id;
  std::vector<Sentence> sentences;
  std::vector<DepTree> trees;
  std::vector<std::string> preamble;  // blank lines before the first sentence
  bool trailing_newline = true;

  std::size_t size() const { return sentences.size(); }
};

/// Reads a CoNLL-U stream. Every token line must have 10 tab-separated
/// columns; word lines need an integer HEAD and consecutive IDs from 1; each
/// sentence must form a valid tree. Errors carry the 1-based line number.
TreebankFile parse_conllu(std::istream& in, std::string parser_id = {});
TreebankFile parse_conllu(const std::string& text, std::string parser_id = {});
TreebankFile read_conllu_file(const std::filesystem::path& path, std::string parser_id = {});

/// Serializes `file` with the HEAD column taken from `predicted`, which is
/// aligned positionally with file.sentences. All other bytes are reproduced
/// as read. Throws std::invalid_argument on a count mismatch.
std::string write_conllu(const TreebankFile& file, std::span<const DepTree> predicted);
/// Same, keeping the file's own trees.
std::string write_conllu(const TreebankFile& file);
void write_conllu_file(const std::filesystem::path& path, const TreebankFile& file,
                       std::span<const DepTree> predicted);

/// agree[i] is true iff all files have the same token count and identical
/// forms for sentence i. Files are aligned positionally.
std::vector<bool> check_segmentation(std::span<const TreebankFile> files);

/// Builds an ensemble from parser files (one per parser, positionally aligned).
/// Sentence metadata comes from the first file. Throws if any sentence fails
/// the segmentation check.
ParseEnsemble make_ensemble(std::span<const TreebankFile> files);

/// A new file holding only the listed sentences, in the given order.
TreebankFile select_sentences(const TreebankFile& file, std::span<const std::size_t> keep);

}  // namespace depagg
