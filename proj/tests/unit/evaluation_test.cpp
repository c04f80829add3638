#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "depagg/evaluation.hpp"
#include "fixtures.hpp"
#include "gen.hpp"

using namespace depagg;

namespace {

TreebankReport report(const std::string& tb, std::map<std::string, double> methods) {
  TreebankReport r;
  r.treebank = tb;
  r.n_sentences = 100;
  r.methods = std::move(methods);
  return r;
}

std::vector<TreebankReport> table_reports() {
  std::vector<TreebankReport> out;
  for (std::size_t i = 0; i < testfx::kHighTreebanks.size(); ++i) {
    out.push_back(report(testfx::kHighTreebanks[i], {{"cim", testfx::kHighCim[i]},
                                                     {"mst", testfx::kHighMst[i]},
                                                     {"hit_scir", testfx::kHighHitScir[i]}}));
  }
  return out;
}

}  // namespace

TEST_CASE("preprocess drops mismatched and unanimous sentences") {
  const auto tb = testfx::preprocess_fixture(60, 5, 10, 9);
  const auto gold = parse_conllu(tb.gold, "gold");
  const auto parsers = testfx::parse_parsers(tb);
  const auto out = preprocess(parsers, gold);
  CHECK(out.log.total == 60);
  CHECK(out.log.seg_dropped == 5);
  CHECK(out.log.agree_dropped == 10);
  CHECK(out.log.surviving == 45);
  CHECK(out.log.rejected);  // 45 < 50
  CHECK(out.ensemble.num_sentences() == 45);
  CHECK(out.kept.front() == 15);

  const auto loose = preprocess(parsers, gold, {.min_sentences = 45, .min_parsers = 9});
  CHECK_FALSE(loose.log.rejected);
}

TEST_CASE("preprocess accepts 50 survivors, rejects 49 and too few parsers") {
  {
    const auto tb = testfx::preprocess_fixture(55, 2, 3, 9);
    const auto out = preprocess(testfx::parse_parsers(tb), parse_conllu(tb.gold));
    CHECK(out.log.surviving == 50);
    CHECK_FALSE(out.log.rejected);
  }
  {
    const auto tb = testfx::preprocess_fixture(54, 2, 3, 9);
    const auto out = preprocess(testfx::parse_parsers(tb), parse_conllu(tb.gold));
    CHECK(out.log.surviving == 49);
    CHECK(out.log.rejected);
    CHECK(out.log.reject_reason.find("49") != std::string::npos);
  }
  {
    const auto tb = testfx::preprocess_fixture(80, 0, 0, 8);
    const auto out = preprocess(testfx::parse_parsers(tb), parse_conllu(tb.gold));
    CHECK(out.log.rejected);
    CHECK(out.log.reject_reason.find("8 parsers") != std::string::npos);
  }
}

TEST_CASE("preprocess is idempotent") {
  const auto tb = testfx::preprocess_fixture(70, 4, 6, 9, 3);
  const auto once = preprocess(testfx::parse_parsers(tb), parse_conllu(tb.gold));
  const auto twice = preprocess(once.parsers, once.gold);
  CHECK(twice.log.seg_dropped == 0);
  CHECK(twice.log.agree_dropped == 0);
  CHECK(twice.log.surviving == once.log.surviving);
  for (std::size_t i = 0; i < once.ensemble.num_sentences(); ++i) {
    for (std::size_t j = 0; j < once.ensemble.num_parsers(); ++j) {
      CHECK(twice.ensemble.tree(i, j) == once.ensemble.tree(i, j));
    }
  }
}

TEST_CASE("uas examples") {
  const std::vector<DepTree> pred{DepTree({0, 1, 1})};
  const std::vector<DepTree> gold{DepTree({0, 1, 2})};
  CHECK(uas(pred, gold) == doctest::Approx(200.0 / 3.0));
  CHECK(uas(gold, gold) == 100.0);
  CHECK_THROWS_AS(uas(std::vector<DepTree>{}, std::vector<DepTree>{}), std::invalid_argument);
  CHECK_THROWS_AS(uas(pred, std::vector<DepTree>{DepTree({0, 1})}), std::invalid_argument);
}

TEST_CASE("uas can skip punctuation") {
  const auto file = parse_conllu(
      "1\tHi\t_\tINTJ\t_\t_\t0\t_\t_\t_\n"
      "2\tthere\t_\tADV\t_\t_\t1\t_\t_\t_\n"
      "3\t!\t_\tPUNCT\t_\t_\t1\t_\t_\t_\n\n");
  const std::vector<DepTree> pred{DepTree({0, 1, 2})};
  CHECK(uas(pred, file.trees) == doctest::Approx(200.0 / 3.0));
  CHECK(uas(pred, file.trees, {.exclude_punct = true}, file.sentences) == 100.0);
  CHECK_THROWS_AS(uas(pred, file.trees, {.exclude_punct = true}), std::invalid_argument);
}

TEST_CASE("uas is invariant to sentence order") {
  testgen::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DepTree> gold;
    std::vector<DepTree> pred;
    const int n = rng.uniform_int(1, 12);
    for (int i = 0; i < n; ++i) {
      const int q = rng.uniform_int(1, 9);
      gold.push_back(testgen::random_tree(rng, q));
      pred.push_back(rng.coin() ? gold.back() : testgen::random_tree(rng, q));
    }
    const double before = uas(pred, gold);
    std::vector<std::size_t> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng.engine());
    std::vector<DepTree> g2;
    std::vector<DepTree> p2;
    for (std::size_t i : perm) {
      g2.push_back(gold[i]);
      p2.push_back(pred[i]);
    }
    CHECK(uas(p2, g2) == doctest::Approx(before).epsilon(1e-12));
    CHECK(before >= 0.0);
    CHECK(before <= 100.0);
  }
}

TEST_CASE("rank_and_select") {
  testgen::Rng rng(5);
  std::vector<DepTree> gold;
  const auto ens = testgen::random_ensemble(rng, 9, 80, 4, 10, 0.3, &gold);

  SUBCASE("top 9 of 9 keeps everyone") {
    const auto sel = rank_and_select(ens, gold, 50, 9, 1);
    CHECK(sel.sample.size() == 50);
    CHECK(std::is_sorted(sel.sample.begin(), sel.sample.end()));
    auto all = sel.selected;
    std::sort(all.begin(), all.end());
    CHECK(all == std::vector<std::size_t>{0, 1, 2, 3, 4, 5, 6, 7, 8});
    CHECK_FALSE(sel.top_k_exceeds_parsers);
    for (std::size_t k = 1; k < sel.ranking.size(); ++k) {
      CHECK(sel.sample_uas[sel.ranking[k - 1]] >= sel.sample_uas[sel.ranking[k]]);
    }
  }
  SUBCASE("deterministic for a seed") {
    const auto a = rank_and_select(ens, gold, 30, 5, 42);
    const auto b = rank_and_select(ens, gold, 30, 5, 42);
    CHECK(a.sample == b.sample);
    CHECK(a.selected == b.selected);
  }
  SUBCASE("sample larger than the treebank uses all sentences") {
    const auto sel = rank_and_select(ens, gold, 500, 3, 1);
    CHECK(sel.sample.size() == 80);
  }
  SUBCASE("top_k beyond m is flagged") {
    const auto sel = rank_and_select(ens, gold, 50, 12, 1);
    CHECK(sel.top_k_exceeds_parsers);
    CHECK(sel.selected.size() == 9);
  }
}

TEST_CASE("rank_and_select puts a gold copy first and breaks ties by file order") {
  testgen::Rng rng(6);
  std::vector<DepTree> gold;
  const auto ens = testgen::random_ensemble(rng, 4, 60, 4, 9, 0.3, &gold);
  std::vector<std::vector<DepTree>> rows;
  for (std::size_t i = 0; i < ens.num_sentences(); ++i) {
    rows.push_back({ens.tree(i, 0), gold[i], ens.tree(i, 1), gold[i], ens.tree(i, 2), ens.tree(i, 3)});
  }
  const ParseEnsemble with_gold({"a", "g1", "b", "g2", "c", "d"}, ens.sentences(), rows);
  const auto sel = rank_and_select(with_gold, gold, 40, 2, 9);
  CHECK(sel.ranking[0] == 1);
  CHECK(sel.ranking[1] == 3);
  CHECK(sel.selected == std::vector<std::size_t>{1, 3});
}

TEST_CASE("vote_mst") {
  SUBCASE("single parser returns its own trees") {
    testgen::Rng rng(2);
    const auto ens = testgen::random_ensemble(rng, 1, 20, 2, 9);
    const auto out = vote_mst(ens);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(out[i] == ens.tree(i, 0));
  }
  SUBCASE("two of three agree") {
    const DepTree a({0, 1, 2});
    const DepTree b({0, 1, 1});
    const ParseEnsemble ens({"p1", "p2", "p3"}, {testgen::make_sentence("s1", 3)}, {{a, b, a}});
    CHECK(vote_mst(ens)[0] == a);
  }
}

TEST_CASE("summarize") {
  SUBCASE("high-resource reference columns") {
    const auto cim = summarize(testfx::kHighCim);
    const auto mst = summarize(testfx::kHighMst);
    CHECK(cim.count == 19);
    CHECK(std::abs(cim.mean - 93.18) <= 0.1);
    CHECK(std::abs(cim.median - 94.02) <= 0.1);
    CHECK(std::abs(mst.mean - 88.42) <= 0.1);
    // Independent recomputation.
    double sum = 0.0;
    for (double v : testfx::kHighCim) sum += v;
    const double mu = sum / 19.0;
    double ss = 0.0;
    for (double v : testfx::kHighCim) ss += (v - mu) * (v - mu);
    CHECK(cim.mean == doctest::Approx(mu));
    CHECK(cim.stddev == doctest::Approx(std::sqrt(ss / 19.0)));
  }
  SUBCASE("degenerate inputs") {
    const std::vector<double> one{87.5};
    const auto s = summarize(one);
    CHECK(s.mean == 87.5);
    CHECK(s.median == 87.5);
    CHECK(s.stddev == 0.0);
    const std::vector<double> two{80.0, 90.0};
    CHECK(summarize(two).mean == 85.0);
    CHECK(summarize(two).median == 85.0);
    CHECK(summarize(two).stddev == 5.0);
    CHECK_THROWS_AS(summarize(std::vector<double>{}), std::invalid_argument);
  }
  SUBCASE("permutation invariance and translation equivariance") {
    testgen::Rng rng(4);
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> v(static_cast<std::size_t>(rng.uniform_int(1, 25)));
      for (double& x : v) x = rng.uniform(50.0, 100.0);
      const auto a = summarize(v);
      std::shuffle(v.begin(), v.end(), rng.engine());
      const auto b = summarize(v);
      CHECK(b.mean == doctest::Approx(a.mean));
      CHECK(b.median == a.median);
      CHECK(b.stddev == doctest::Approx(a.stddev));
      const double c = rng.uniform(-10.0, 10.0);
      for (double& x : v) x += c;
      const auto t = summarize(v);
      CHECK(t.mean == doctest::Approx(a.mean + c));
      CHECK(t.median == doctest::Approx(a.median + c));
      CHECK(t.stddev == doctest::Approx(a.stddev).epsilon(1e-9));
    }
  }
}

TEST_CASE("summarize_reports groups by method") {
  const auto reps = table_reports();
  const auto s = summarize_reports(reps, "high");
  CHECK(s.group == "high");
  CHECK(s.methods.at("cim").count == 19);
  CHECK(std::abs(s.methods.at("mst").mean - 88.42) <= 0.1);
  const auto j = to_json(s);
  CHECK(j["methods"]["cim"]["median"].get<double>() == doctest::Approx(94.0));
}

TEST_CASE("method_diff") {
  const auto reps = table_reports();
  const auto d = method_diff(reps, "cim", "hit_scir");
  REQUIRE(d.per_treebank.size() == 19);
  CHECK(d.per_treebank[0].first == "bg_btb");
  CHECK(d.per_treebank[0].second == doctest::Approx(4.7));
  CHECK(d.positive + d.negative + d.zero == 19);

  const auto same = method_diff(reps, "cim", "cim");
  CHECK(same.zero == 19);
  for (const auto& [tb, v] : same.per_treebank) CHECK(v == 0.0);

  const auto back = method_diff(reps, "hit_scir", "cim");
  for (std::size_t i = 0; i < 19; ++i) CHECK(back.per_treebank[i].second == -d.per_treebank[i].second);
  CHECK(back.positive == d.negative);

  auto broken = reps;
  broken[3].methods.erase("mst");
  CHECK_THROWS_AS(method_diff(broken, "cim", "mst"), std::invalid_argument);
  const auto diffs = method_diffs(broken, "cim");
  REQUIRE(diffs.size() == 1);
  CHECK(diffs[0].baseline == "hit_scir");
  CHECK_THROWS_AS(method_diffs(reps, "crh"), std::invalid_argument);
}

TEST_CASE("treebank report json round trip") {
  auto r = report("en_ewt", {{"cim", 93.6}, {"mst", 88.6}});
  r.selected_parsers = {"p01", "p03"};
  r.seg_dropped = 4;
  r.agree_dropped = 7;
  const auto back = treebank_report_from_json(nlohmann::json::parse(to_json(r).dump()));
  CHECK(back.treebank == r.treebank);
  CHECK(back.n_sentences == r.n_sentences);
  CHECK(back.methods == r.methods);
  CHECK(back.selected_parsers == r.selected_parsers);
  CHECK(back.seg_dropped == 4);
  CHECK(back.agree_dropped == 7);

  auto bad = to_json(r);
  bad["methods"]["cim"] = 101.0;
  CHECK_THROWS_AS(treebank_report_from_json(bad), std::invalid_argument);
}
