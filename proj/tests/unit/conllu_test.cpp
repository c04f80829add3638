#include <doctest.h>

#include <fstream>
#include <sstream>

#include "depagg/conllu.hpp"
#include "gen.hpp"

using namespace depagg;

namespace {

std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(DEPAGG_FIXTURE_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string word(int id, const std::string& form, int head) {
  return std::to_string(id) + "\t" + form + "\t_\t_\t_\t_\t" + std::to_string(head) + "\t_\t_\t_\n";
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST_CASE("two-token sentence") {
  const auto f = parse_conllu(word(1, "He", 2) + word(2, "runs", 0));
  REQUIRE(f.size() == 1);
  CHECK(f.trees[0] == DepTree({2, 0}));
  CHECK(f.sentences[0].tokens[0].form == "He");
  CHECK(f.sentences[0].sentence_id == "#1");
}

TEST_CASE("blank lines separate sentences") {
  std::string text = word(1, "a", 0) + word(2, "b", 1) + word(3, "c", 1) + "\n";
  text += word(1, "a", 0) + word(2, "b", 1) + word(3, "c", 2) + word(4, "d", 3) + word(5, "e", 4) + "\n";
  const auto f = parse_conllu(text);
  REQUIRE(f.size() == 2);
  CHECK(f.sentences[0].size() == 3);
  CHECK(f.sentences[1].size() == 5);
}

TEST_CASE("format errors carry the line number") {
  const std::string nine = "1\tHe\t_\t_\t_\t_\t0\t_\t_\n";
  try {
    parse_conllu("# c\n" + nine);
    FAIL("expected ConlluError");
  } catch (const ConlluError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_conllu("1\tHe\t_\t_\t_\t_\tx\t_\t_\t_\n"), ConlluError);
  CHECK_THROWS_AS(parse_conllu(word(2, "He", 0)), ConlluError);
  try {
    parse_conllu(word(1, "a", 0) + "\n" + word(1, "a", 2) + word(2, "b", 1));
    FAIL("expected ConlluError");
  } catch (const ConlluError& e) {
    CHECK(e.line() == 3);  // first line of the offending block
    CHECK(std::string(e.what()).find("cycle") != std::string::npos);
  }
}

TEST_CASE("sent_id comment names the sentence") {
  const auto f = parse_conllu("# sent_id = dev-7\n# text = x\n" + word(1, "x", 0));
  CHECK(f.sentences[0].sentence_id == "dev-7");
  CHECK(f.sentences[0].comments.size() == 2);
}

TEST_CASE("fixture round trip is byte-identical") {
  const std::string text = read_fixture("roundtrip.conllu");
  const auto f = parse_conllu(text, "fx");
  REQUIRE(f.size() == 4);
  CHECK(f.sentences[0].tokens.size() == 6);  // ranges are not words
  CHECK(f.sentences[1].tokens.size() == 6);  // nor empty nodes
  CHECK(f.sentences[2].sentence_id == "s3");
  CHECK(f.sentences[3].sentence_id == "#4");
  CHECK(write_conllu(f) == text);
  // parse . write . parse is stable
  const auto again = parse_conllu(write_conllu(f));
  CHECK(write_conllu(again) == text);
  CHECK(again.trees == f.trees);
}

TEST_CASE("changed heads touch only the HEAD field") {
  const std::string text = read_fixture("roundtrip.conllu");
  const auto f = parse_conllu(text);
  auto predicted = f.trees;
  predicted[0] = DepTree({0, 1, 1, 1, 1, 5});
  predicted[2] = DepTree({2, 0});
  const auto out = write_conllu(f, predicted);
  const auto a = lines_of(text);
  const auto b = lines_of(out);
  REQUIRE(a.size() == b.size());
  int changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == b[i]) continue;
    ++changed;
    std::vector<std::string> fa, fb;
    std::istringstream sa(a[i]), sb(b[i]);
    for (std::string c; std::getline(sa, c, '\t');) fa.push_back(c);
    for (std::string c; std::getline(sb, c, '\t');) fb.push_back(c);
    REQUIRE(fa.size() == 10);
    REQUIRE(fb.size() == 10);
    for (std::size_t c = 0; c < 10; ++c) {
      if (c != 6) CHECK(fa[c] == fb[c]);
    }
    CHECK(fa[6] != fb[6]);
  }
  // sentence 1: tokens 3, 4, 6 change; sentence 3: both tokens change.
  CHECK(changed == 5);
  CHECK(parse_conllu(out).trees == predicted);
}

TEST_CASE("write rejects mismatched predictions") {
  const auto f = parse_conllu(word(1, "a", 0) + word(2, "b", 1));
  CHECK_THROWS_AS(write_conllu(f, std::vector<DepTree>{}), std::invalid_argument);
  CHECK_THROWS_AS(write_conllu(f, std::vector<DepTree>{DepTree({0})}), std::invalid_argument);
}

TEST_CASE("file without final newline keeps it that way") {
  const std::string text = word(1, "a", 0).substr(0, word(1, "a", 0).size() - 1);
  const auto f = parse_conllu(text);
  CHECK(write_conllu(f) == text);
}

TEST_CASE("check_segmentation") {
  const auto abc = parse_conllu(word(1, "a", 0) + word(2, "b", 1) + word(3, "c", 1));
  const auto abc2 = parse_conllu(word(1, "a", 2) + word(2, "b", 0) + word(3, "c", 2));
  const auto split = parse_conllu(word(1, "a", 0) + word(2, "b1", 1) + word(3, "b2", 1) + word(4, "c", 1));
  const auto renamed = parse_conllu(word(1, "a", 0) + word(2, "B", 1) + word(3, "c", 1));
  CHECK(check_segmentation(std::vector{abc, abc2}) == std::vector<bool>{true});
  CHECK(check_segmentation(std::vector{abc, split}) == std::vector<bool>{false});
  CHECK(check_segmentation(std::vector{abc, renamed}) == std::vector<bool>{false});
  CHECK(check_segmentation(std::vector{abc}) == std::vector<bool>{true});
  const auto two = parse_conllu(word(1, "a", 0) + "\n" + word(1, "a", 0));
  CHECK_THROWS_AS(check_segmentation(std::vector{abc, two}), std::invalid_argument);
}

TEST_CASE("make_ensemble and select_sentences") {
  const auto p1 = parse_conllu(word(1, "a", 0) + word(2, "b", 1) + "\n" + word(1, "x", 0), "p1");
  const auto p2 = parse_conllu(word(1, "a", 2) + word(2, "b", 0) + "\n" + word(1, "x", 0), "p2");
  const auto e = make_ensemble(std::vector{p1, p2});
  CHECK(e.parser_ids() == std::vector<std::string>{"p1", "p2"});
  CHECK(e.tree(0, 1) == DepTree({2, 0}));
  const std::vector<std::size_t> keep{1};
  const auto sub = select_sentences(p1, keep);
  CHECK(sub.size() == 1);
  CHECK(write_conllu(sub) == word(1, "x", 0) + "\n");
}

TEST_CASE("property: random files survive parse/write unchanged") {
  testgen::Rng rng(5);
  for (int it = 0; it < 100; ++it) {
    std::string text;
    const int n = rng.uniform_int(1, 4);
    for (int s = 0; s < n; ++s) {
      if (rng.coin()) text += "# sent_id = r" + std::to_string(s) + "\n";
      const int q = rng.uniform_int(1, 6);
      const auto t = testgen::random_tree(rng, q, false);
      for (int d = 1; d <= q; ++d) text += word(d, "t" + std::to_string(rng.uniform_int(0, 9)), t.head(d));
      if (s + 1 < n || rng.coin()) text += "\n";
    }
    const auto f = parse_conllu(text);
    CHECK(f.size() == static_cast<std::size_t>(n));
    CHECK(write_conllu(f) == text);
  }
}
