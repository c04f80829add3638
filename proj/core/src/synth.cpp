#include "depagg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include "depagg/arborescence.hpp"
#include "depagg/evaluation.hpp"

namespace depagg::synth {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix64(splitmix64(splitmix64(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  // Uniform in [0, n).
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      const std::uint64_t r = engine_();
      if (r >= threshold) return static_cast<std::size_t>(r % bound);
    }
  }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// Uniform head among {0..q} \ excluded.
int draw_head(Rng& rng, int q, std::initializer_list<int> excluded) {
  std::vector<int> options;
  for (int h = 0; h <= q; ++h) {
    if (std::find(excluded.begin(), excluded.end(), h) == excluded.end()) options.push_back(h);
  }
  if (options.empty()) return -1;
  return options[rng.below(options.size())];
}

bool is_single_root_tree(const std::vector<int>& heads) {
  return std::count(heads.begin(), heads.end(), 0) == 1 && validate_tree(heads, heads.size()).ok();
}

// `hit` lists the tokens that must get a wrong head.
DepTree corrupt(const DepTree& gold, const std::vector<int>& hit, Rng& rng) {
  const int q = static_cast<int>(gold.size());
  if (hit.empty() || q == 1) return gold;

  // Redraw the wrong heads until they form a tree, so the number of wrong
  // tokens stays exactly |hit|.
  constexpr int kAttempts = 100;
  std::vector<int> pref(gold.heads().begin(), gold.heads().end());
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    for (int d : hit) pref[static_cast<std::size_t>(d - 1)] = draw_head(rng, q, {d, gold.head(d)});
    if (is_single_root_tree(pref)) return DepTree(std::move(pref));
  }

  // Repair the last draw: keep the intended right/wrong pattern for as many
  // tokens as possible, preferring the drawn wrong heads.
  std::vector<bool> wrong(static_cast<std::size_t>(q) + 1, false);
  for (int d : hit) wrong[static_cast<std::size_t>(d)] = true;
  WeightedTokenGraph g;
  g.q = gold.size();
  for (int d = 1; d <= q; ++d) {
    const int p = pref[static_cast<std::size_t>(d - 1)];
    for (int h = 0; h <= q; ++h) {
      if (h == d) continue;
      double w = 0.0;
      if (wrong[static_cast<std::size_t>(d)]) {
        w = h == p ? 1.0 : (h == gold.head(d) ? 0.0 : 0.5);
      } else {
        w = h == gold.head(d) ? 1.0 : 0.0;
      }
      g.edges.push_back({h, d, w});
    }
  }
  return max_arborescence(g, true);
}

TreebankFile to_file(const std::vector<DepTree>& trees, const std::string& parser_id) {
  TreebankFile f;
  f.parser_id = parser_id;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    Sentence s;
    s.sentence_id = "synth-" + std::to_string(i + 1);
    const std::string comment = "# sent_id = " + s.sentence_id;
    s.comments.push_back(comment);
    s.layout.push_back({BlockLine::Kind::kComment, comment, 0});
    for (std::size_t t = 0; t < trees[i].size(); ++t) {
      Token tok;
      tok.index = static_cast<int>(t + 1);
      tok.form = "w" + std::to_string(t + 1);
      tok.columns.fill("_");
      tok.columns[static_cast<std::size_t>(Column::kId)] = std::to_string(t + 1);
      tok.columns[static_cast<std::size_t>(Column::kForm)] = tok.form;
      tok.head = trees[i].heads()[t];
      tok.columns[static_cast<std::size_t>(Column::kHead)] = std::to_string(tok.head);
      s.layout.push_back({BlockLine::Kind::kWord, {}, t});
      s.tokens.push_back(std::move(tok));
    }
    s.terminators.emplace_back();
    f.sentences.push_back(std::move(s));
    f.trees.push_back(trees[i]);
  }
  return f;
}

}  // namespace

std::vector<double> linear_rates(std::size_t n, double lo, double hi) {
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(n - 1);
  }
  return out;
}

DepTree random_tree(std::size_t q, std::uint64_t seed) {
  if (q == 0) throw std::invalid_argument("random_tree: q must be positive");
  Rng rng(seed);
  const int n = static_cast<int>(q);
  const int root = static_cast<int>(rng.below(q)) + 1;
  std::vector<int> heads(q, 0);
  if (n == 1) return DepTree(heads);

  // Uniform labeled tree on tokens 1..q from a random Pruefer sequence.
  std::vector<std::vector<int>> adj(q + 1);
  if (n == 2) {
    adj[1].push_back(2);
    adj[2].push_back(1);
  } else {
    std::vector<int> code(q - 2);
    for (int& c : code) c = static_cast<int>(rng.below(q)) + 1;
    std::vector<int> degree(q + 1, 1);
    for (int c : code) ++degree[static_cast<std::size_t>(c)];
    std::set<int> leaves;
    for (int v = 1; v <= n; ++v) {
      if (degree[static_cast<std::size_t>(v)] == 1) leaves.insert(v);
    }
    for (int c : code) {
      const int leaf = *leaves.begin();
      leaves.erase(leaves.begin());
      adj[static_cast<std::size_t>(leaf)].push_back(c);
      adj[static_cast<std::size_t>(c)].push_back(leaf);
      if (--degree[static_cast<std::size_t>(c)] == 1) leaves.insert(c);
    }
    const int u = *leaves.begin();
    const int v = *std::next(leaves.begin());
    adj[static_cast<std::size_t>(u)].push_back(v);
    adj[static_cast<std::size_t>(v)].push_back(u);
  }
  // Orient away from the root token.
  std::vector<int> stack{root};
  std::vector<bool> seen(q + 1, false);
  seen[static_cast<std::size_t>(root)] = true;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (seen[static_cast<std::size_t>(w)]) continue;
      seen[static_cast<std::size_t>(w)] = true;
      heads[static_cast<std::size_t>(w - 1)] = v;
      stack.push_back(w);
    }
  }
  return DepTree(std::move(heads));
}

Corpus generate(const Config& config) {
  if (config.min_tokens == 0 || config.min_tokens > config.max_tokens) {
    throw std::invalid_argument("synth: token range must satisfy 1 <= min <= max");
  }
  if (config.corruption.empty()) throw std::invalid_argument("synth: at least one parser is required");
  for (double r : config.corruption) {
    if (!(r >= 0.0 && r < 1.0)) throw std::invalid_argument("synth: corruption rates must lie in [0, 1)");
  }
  for (const auto& d : config.duplicates) {
    if (d.source >= config.corruption.size()) throw std::invalid_argument("synth: duplicate of unknown parser");
  }
  const std::size_t noisy = config.corruption.size();
  const std::size_t m = noisy + config.duplicates.size();

  std::vector<DepTree> gold;
  std::vector<std::size_t> offset{0};  // first global token index per sentence
  const std::size_t span = config.max_tokens - config.min_tokens + 1;
  for (std::size_t i = 0; i < config.n_sentences; ++i) {
    Rng sentence_rng(derive(config.seed, i, 0));
    const std::size_t q = config.min_tokens + sentence_rng.below(span);
    gold.push_back(random_tree(q, derive(config.seed, i, 1)));
    offset.push_back(offset.back() + q);
  }
  const std::size_t total = offset.back();

  // Each noisy parser gets a uniformly random set of round(rate * total)
  // wrong tokens, so measured accuracy moves off 100 * (1 - rate) only when
  // a tree has to be repaired.
  std::vector<std::vector<bool>> wrong(noisy, std::vector<bool>(total, false));
  for (std::size_t j = 0; j < noisy; ++j) {
    Rng rng(derive(~config.seed, j, 0));
    const auto k = static_cast<std::size_t>(std::llround(config.corruption[j] * static_cast<double>(total)));
    std::vector<std::size_t> idx(total);
    for (std::size_t t = 0; t < total; ++t) idx[t] = t;
    for (std::size_t t = 0; t < k; ++t) {
      std::swap(idx[t], idx[t + rng.below(total - t)]);
      wrong[j][idx[t]] = true;
    }
  }

  std::vector<std::vector<DepTree>> parsers(m);
  for (std::size_t i = 0; i < config.n_sentences; ++i) {
    for (std::size_t j = 0; j < noisy; ++j) {
      std::vector<int> hit;
      for (std::size_t t = offset[i]; t < offset[i + 1]; ++t) {
        if (wrong[j][t]) hit.push_back(static_cast<int>(t - offset[i]) + 1);
      }
      Rng rng(derive(config.seed, i, j + 2));
      parsers[j].push_back(corrupt(gold[i], hit, rng));
    }
    for (std::size_t k = 0; k < config.duplicates.size(); ++k) {
      parsers[noisy + k].push_back(parsers[config.duplicates[k].source].back());
    }
  }

  Corpus c;
  c.gold = to_file(gold, "gold");
  for (std::size_t j = 0; j < m; ++j) {
    std::string name = std::to_string(j + 1);
    if (name.size() < 2) name.insert(0, "0");
    c.parsers.push_back(to_file(parsers[j], "p" + name));
    c.accuracy.push_back(config.n_sentences == 0 ? 100.0 : uas(parsers[j], gold));
  }
  c.ensemble = make_ensemble(c.parsers);
  return c;
}

void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "parsers");
  write_conllu_file(dir / "gold.conllu", corpus.gold, corpus.gold.trees);
  for (const auto& p : corpus.parsers) {
    write_conllu_file(dir / "parsers" / (p.parser_id + ".conllu"), p, p.trees);
  }
}

}  // namespace depagg::synth
