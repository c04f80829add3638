#include "depagg/conllu.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <iterator>

namespace depagg {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::string sent_id_of(const std::vector<std::string>& comments, std::size_t ordinal) {
  constexpr std::string_view kKey = "sent_id";
  for (const auto& c : comments) {
    std::string_view v(c);
    v.remove_prefix(1);
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    if (!v.starts_with(kKey)) continue;
    v.remove_prefix(kKey.size());
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    if (v.empty() || v.front() != '=') continue;
    v.remove_prefix(1);
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    if (!v.empty()) return std::string(v);
  }
  return "#" + std::to_string(ordinal);
}

class Reader {
 public:
  explicit Reader(std::string parser_id) { file_.parser_id = std::move(parser_id); }

  TreebankFile run(const std::string& text) {
    std::size_t pos = 0;
    file_.trailing_newline = text.empty() || text.back() == '\n';
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string::npos) nl = text.size();
      ++line_no_;
      feed(std::string_view(text).substr(pos, nl - pos));
      pos = nl + 1;
    }
    if (open_) close_block();
    return std::move(file_);
  }

 private:
  void feed(std::string_view raw) {
    std::string_view line = raw;
    const bool cr = !line.empty() && line.back() == '\r';
    if (cr) line.remove_suffix(1);

    if (line.empty()) {
      if (open_) {
        close_block();
        file_.sentences.back().terminators.emplace_back(raw);
      } else if (file_.sentences.empty()) {
        file_.preamble.emplace_back(raw);
      } else {
        file_.sentences.back().terminators.emplace_back(raw);
      }
      return;
    }
    if (!open_) {
      current_ = Sentence{};
      heads_.clear();
      block_start_ = line_no_;
      open_ = true;
    }
    if (line.front() == '#') {
      current_.comments.emplace_back(line);
      current_.layout.push_back({BlockLine::Kind::kComment, std::string(raw), 0});
      return;
    }
    const auto cols = split_tabs(line);
    if (cols.size() != kNumColumns) {
      throw ConlluError(line_no_, "expected 10 tab-separated columns, found " +
                                      std::to_string(cols.size()));
    }
    const std::string_view id = cols[0];
    if (id.find('-') != std::string_view::npos) {
      current_.layout.push_back({BlockLine::Kind::kRange, std::string(raw), 0});
      return;
    }
    if (id.find('.') != std::string_view::npos) {
      current_.layout.push_back({BlockLine::Kind::kEmptyNode, std::string(raw), 0});
      return;
    }
    int index = 0;
    if (!parse_int(id, index)) throw ConlluError(line_no_, "non-integer ID '" + std::string(id) + "'");
    if (index != static_cast<int>(current_.tokens.size()) + 1) {
      throw ConlluError(line_no_, "token ID " + std::to_string(index) + " is out of sequence");
    }
    int head = 0;
    const auto head_col = cols[static_cast<std::size_t>(Column::kHead)];
    if (!parse_int(head_col, head)) {
      throw ConlluError(line_no_, "non-integer HEAD '" + std::string(head_col) + "'");
    }
    Token tok;
    tok.index = index;
    tok.form = std::string(cols[static_cast<std::size_t>(Column::kForm)]);
    for (std::size_t c = 0; c < kNumColumns; ++c) tok.columns[c] = std::string(cols[c]);
    tok.head = head;
    tok.carriage_return = cr;
    current_.layout.push_back({BlockLine::Kind::kWord, {}, current_.tokens.size()});
    current_.tokens.push_back(std::move(tok));
    heads_.push_back(head);
  }

  void close_block() {
    open_ = false;
    if (current_.tokens.empty()) throw ConlluError(block_start_, "sentence has no word lines");
    const auto verdict = validate_tree(heads_, heads_.size());
    if (!verdict.ok()) {
      throw ConlluError(block_start_, "sentence does not form a tree: " + verdict.message());
    }
    current_.sentence_id = sent_id_of(current_.comments, file_.sentences.size() + 1);
    file_.trees.emplace_back(heads_);
    file_.sentences.push_back(std::move(current_));
  }

  TreebankFile file_;
  Sentence current_;
  std::vector<int> heads_;
  bool open_ = false;
  std::size_t line_no_ = 0;
  std::size_t block_start_ = 0;
};

void append_word(std::string& out, const Token& tok, int head) {
  for (std::size_t c = 0; c < kNumColumns; ++c) {
    if (c > 0) out.push_back('\t');
    if (c == static_cast<std::size_t>(Column::kHead) && head != tok.head) {
      out += std::to_string(head);
    } else {
      out += tok.columns[c];
    }
  }
  if (tok.carriage_return) out.push_back('\r');
}

}  // namespace

ConlluError::ConlluError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

TreebankFile parse_conllu(const std::string& text, std::string parser_id) {
  return Reader(std::move(parser_id)).run(text);
}

TreebankFile parse_conllu(std::istream& in, std::string parser_id) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_conllu(text, std::move(parser_id));
}

TreebankFile read_conllu_file(const std::filesystem::path& path, std::string parser_id) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  if (parser_id.empty()) parser_id = path.stem().string();
  try {
    return parse_conllu(in, std::move(parser_id));
  } catch (const ConlluError& e) {
    throw ConlluError(e.line(), path.string() + ": " + e.what());
  }
}

std::string write_conllu(const TreebankFile& file, std::span<const DepTree> predicted) {
  if (predicted.size() != file.sentences.size()) {
    throw std::invalid_argument("write_conllu: " + std::to_string(predicted.size()) +
                                " predicted trees for " + std::to_string(file.sentences.size()) +
                                " sentences");
  }
  std::string out;
  bool first = true;
  auto emit = [&](auto&& append) {
    if (!first) out.push_back('\n');
    first = false;
    append();
  };
  for (const auto& p : file.preamble) emit([&] { out += p; });
  for (std::size_t i = 0; i < file.sentences.size(); ++i) {
    const Sentence& s = file.sentences[i];
    const DepTree& tree = predicted[i];
    if (tree.size() != s.size()) {
      throw std::invalid_argument("write_conllu: sentence " + s.sentence_id + " has " +
                                  std::to_string(s.size()) + " tokens but the tree has " +
                                  std::to_string(tree.size()));
    }
    for (const BlockLine& line : s.layout) {
      if (line.kind == BlockLine::Kind::kWord) {
        emit([&] {
          const Token& tok = s.tokens[line.token];
          append_word(out, tok, tree.head(tok.index));
        });
      } else {
        emit([&] { out += line.raw; });
      }
    }
    for (const auto& t : s.terminators) emit([&] { out += t; });
  }
  if (!first && file.trailing_newline) out.push_back('\n');
  return out;
}

std::string write_conllu(const TreebankFile& file) { return write_conllu(file, file.trees); }

void write_conllu_file(const std::filesystem::path& path, const TreebankFile& file,
                       std::span<const DepTree> predicted) {
  const std::string text = write_conllu(file, predicted);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::vector<bool> check_segmentation(std::span<const TreebankFile> files) {
  if (files.empty()) return {};
  const std::size_t n = files.front().size();
  for (const auto& f : files) {
    if (f.size() != n) {
      throw std::invalid_argument("sentence count differs across files: " +
                                  files.front().parser_id + " has " + std::to_string(n) + ", " +
                                  f.parser_id + " has " + std::to_string(f.size()));
    }
  }
  std::vector<bool> agree(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& ref = files.front().sentences[i].tokens;
    for (const auto& f : files.subspan(1)) {
      const auto& toks = f.sentences[i].tokens;
      bool same = toks.size() == ref.size();
      for (std::size_t t = 0; same && t < toks.size(); ++t) same = toks[t].form == ref[t].form;
      if (!same) {
        agree[i] = false;
        break;
      }
    }
  }
  return agree;
}

ParseEnsemble make_ensemble(std::span<const TreebankFile> files) {
  if (files.empty()) return {};
  const auto agree = check_segmentation(files);
  for (std::size_t i = 0; i < agree.size(); ++i) {
    if (!agree[i]) {
      throw std::invalid_argument("segmentation differs across parsers at sentence " +
                                  files.front().sentences[i].sentence_id);
    }
  }
  std::vector<std::string> ids;
  for (const auto& f : files) ids.push_back(f.parser_id);
  std::vector<std::vector<DepTree>> trees(files.front().size());
  for (std::size_t i = 0; i < trees.size(); ++i) {
    for (const auto& f : files) trees[i].push_back(f.trees[i]);
  }
  return ParseEnsemble(std::move(ids), files.front().sentences, std::move(trees));
}

TreebankFile select_sentences(const TreebankFile& file, std::span<const std::size_t> keep) {
  TreebankFile out;
  out.parser_id = file.parser_id;
  out.trailing_newline = true;
  for (std::size_t i : keep) {
    out.sentences.push_back(file.sentences.at(i));
    out.trees.push_back(file.trees.at(i));
    if (out.sentences.back().terminators.empty()) out.sentences.back().terminators.emplace_back();
  }
  return out;
}

}  // namespace depagg
