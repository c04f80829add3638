#include <doctest.h>

#include "depagg/arborescence.hpp"
#include "gen.hpp"

using namespace depagg;

TEST_CASE("single tree graph returns that tree") {
  const DepTree t({3, 3, 0, 3, 4});
  WeightedTokenGraph g;
  g.q = t.size();
  for (const auto& e : edges_of(t)) g.edges.push_back({e.head, e.dependent, 1.0});
  CHECK(max_arborescence(g) == t);
  CHECK(brute_force_arborescence(g) == t);
}

TEST_CASE("q=2 worked example") {
  WeightedTokenGraph g;
  g.q = 2;
  g.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 2.0}, {2, 1, 0.5}};
  const auto t = max_arborescence(g);
  CHECK(t == DepTree({0, 1}));
  CHECK(tree_weight(g, t) == doctest::Approx(3.0));
  CHECK(brute_force_arborescence(g) == t);
}

TEST_CASE("brute force small cases") {
  WeightedTokenGraph one;
  one.q = 1;
  one.edges = {{0, 1, 0.7}};
  CHECK(brute_force_arborescence(one) == DepTree({0}));
  CHECK(max_arborescence(one) == DepTree({0}));

  testgen::Rng rng(0);
  auto flat = testgen::complete_graph(rng, 3, true);
  for (auto& e : flat.edges) e.weight = 1.0;
  // Lexicographically smallest single-root tree on 3 tokens.
  CHECK(brute_force_arborescence(flat) == DepTree({0, 1, 1}));
  CHECK(max_arborescence(flat) == DepTree({0, 1, 1}));
  CHECK(brute_force_arborescence(flat, false) == DepTree({0, 0, 0}));
  CHECK(max_arborescence(flat, false) == DepTree({0, 0, 0}));
  WeightedTokenGraph big;
  big.q = 9;
  CHECK_THROWS_AS(brute_force_arborescence(big), std::invalid_argument);
}

TEST_CASE("single root enforcement") {
  WeightedTokenGraph g;
  g.q = 3;
  g.edges = {{0, 1, 5.0}, {0, 2, 5.0}, {0, 3, 5.0}, {1, 2, 1.0}, {1, 3, 1.0}, {2, 3, 0.5}};
  CHECK(max_arborescence(g, false) == DepTree({0, 0, 0}));
  CHECK(max_arborescence(g, true) == DepTree({0, 1, 1}));
}

TEST_CASE("cycle contraction") {
  // 1 and 2 prefer each other; the cycle must be broken at the cheaper end.
  WeightedTokenGraph g;
  g.q = 3;
  g.edges = {{0, 1, 1.0}, {0, 2, 0.5}, {1, 2, 10.0}, {2, 1, 10.0}, {2, 3, 3.0}, {3, 1, 4.0}};
  const auto t = max_arborescence(g, false);
  CHECK(t == brute_force_arborescence(g, false));
  CHECK(tree_weight(g, t) == doctest::Approx(14.0));
}

TEST_CASE("errors") {
  WeightedTokenGraph g;
  g.q = 2;
  g.edges = {{0, 1, 1.0}};
  CHECK_THROWS_AS(max_arborescence(g), NoArborescence);
  g.edges = {{0, 1, 1.0}, {1, 2, std::nan("")}};
  CHECK_THROWS(max_arborescence(g));
  g.edges = {{0, 1, 1.0}, {5, 2, 1.0}};
  CHECK_THROWS(max_arborescence(g));
  g.edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  CHECK_THROWS_AS(tree_weight(g, DepTree({0, 0})), std::invalid_argument);
}

TEST_CASE("parallel edges keep the larger weight") {
  WeightedTokenGraph g;
  g.q = 2;
  g.edges = {{0, 1, 1.0}, {0, 2, 1.0}, {1, 2, 0.1}, {1, 2, 3.0}, {2, 1, 2.0}};
  CHECK(max_arborescence(g) == DepTree({0, 1}));
  CHECK(tree_weight(g, DepTree({0, 1})) == doctest::Approx(4.0));
}

TEST_CASE("property: oracle equivalence, real and tied integer weights") {
  testgen::Rng rng(1234);
  for (int it = 0; it < 400; ++it) {
    const int q = rng.uniform_int(1, 6);
    const bool ints = it % 2 == 1;
    auto g = testgen::complete_graph(rng, q, ints);
    // Sparsify some instances but keep one tree feasible.
    if (rng.coin(0.3)) {
      const auto keep = testgen::random_tree(rng, q);
      std::vector<WeightedEdge> sparse;
      for (const auto& e : g.edges) {
        if (keep.head(e.dependent) == e.head || rng.coin(0.4)) sparse.push_back(e);
      }
      g.edges = sparse;
    }
    for (bool single : {true, false}) {
      const auto fast = max_arborescence(g, single);
      const auto slow = brute_force_arborescence(g, single);
      CHECK(validate_tree(fast.heads(), fast.size()).ok());
      if (single) CHECK(std::count(fast.heads().begin(), fast.heads().end(), 0) == 1);
      CHECK(tree_weight(g, fast) == tree_weight(g, slow));
      CHECK(fast == slow);
    }
  }
}

TEST_CASE("property: constant shift leaves the tree unchanged") {
  testgen::Rng rng(99);
  for (int it = 0; it < 200; ++it) {
    const int q = rng.uniform_int(2, 7);
    auto g = testgen::complete_graph(rng, q, false);
    const auto base = max_arborescence(g);
    const double c = rng.uniform(-3.0, 3.0);
    auto shifted = g;
    for (auto& e : shifted.edges) e.weight += c;
    const auto moved = max_arborescence(shifted);
    CHECK(moved == base);
    CHECK(tree_weight(shifted, moved) == doctest::Approx(tree_weight(g, base) + q * c));
  }
}

TEST_CASE("property: decoded trees beat every parser tree") {
  testgen::Rng rng(7);
  for (int it = 0; it < 30; ++it) {
    const auto e = testgen::random_ensemble(rng, 5, 6, 1, 9, 0.6);
    const auto m = label_matrix(e);
    std::vector<double> scores(m.rows());
    for (auto& s : scores) s = rng.uniform();
    const auto trees = decode_sentences(m.edge_union(), scores);
    REQUIRE(trees.size() == e.num_sentences());
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const auto g = sentence_graph(m.edge_union(), i, scores);
      CHECK(validate_tree(trees[i].heads(), trees[i].size()).ok());
      for (std::size_t j = 0; j < e.num_parsers(); ++j) {
        CHECK(tree_weight(g, trees[i]) >= tree_weight(g, e.tree(i, j)) - 1e-12);
      }
    }
  }
}
