#include "depagg/arborescence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace depagg {
namespace {

constexpr double kTieTolerance = 1e-12;

bool within_tie(double w, double best) {
  return w >= best - kTieTolerance * std::max(1.0, std::abs(best));
}

// Secondary key of an arc: the vector (-h_1, ..., -h_q) restricted to the
// dependents it touches, stored sparsely as (dependent, coefficient) pairs
// sorted by dependent. Summed over a tree it is minus the head sequence, so
// the lexicographically largest key is the lexicographically smallest tree.
using Sparse = std::vector<std::pair<int, long long>>;

Sparse subtract(const Sparse& a, const Sparse& b) {
  Sparse out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].first < a[i].first) {
      out.emplace_back(b[j].first, -b[j].second);
      ++j;
    } else {
      const long long c = a[i].second - b[j].second;
      if (c != 0) out.emplace_back(a[i].first, c);
      ++i;
      ++j;
    }
  }
  return out;
}

// Sign of a - b in lexicographic order.
int compare(const Sparse& a, const Sparse& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() || j < b.size()) {
    long long ca = 0;
    long long cb = 0;
    if (j == b.size() || (i < a.size() && a[i].first < b[j].first)) {
      ca = a[i++].second;
    } else if (i == a.size() || b[j].first < a[i].first) {
      cb = b[j++].second;
    } else {
      ca = a[i++].second;
      cb = b[j++].second;
    }
    if (ca != cb) return ca > cb ? 1 : -1;
  }
  return 0;
}

struct Arc {
  int from;
  int to;
  double weight;
  Sparse key;
};

// Ordered group R x Z^q: weight first (equal within `tol`), then the key.
bool better(const Arc& a, const Arc& b, double tol) {
  if (a.weight > b.weight + tol) return true;
  if (a.weight < b.weight - tol) return false;
  return compare(a.key, b.key) > 0;
}

// Chu-Liu/Edmonds by recursive cycle contraction over (weight, key). Returns,
// for every node, the index into `arcs` of its incoming arc (-1 for the
// root), or nullopt when some node cannot be reached.
std::optional<std::vector<int>> edmonds(int n, const std::vector<Arc>& arcs, int root, double tol) {
  constexpr int kNone = -1;
  std::vector<int> best(static_cast<std::size_t>(n), kNone);
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
    const Arc& arc = arcs[static_cast<std::size_t>(a)];
    if (arc.to == root || arc.from == arc.to) continue;
    int& b = best[static_cast<std::size_t>(arc.to)];
    if (b == kNone || better(arc, arcs[static_cast<std::size_t>(b)], tol)) b = a;
  }
  for (int v = 0; v < n; ++v) {
    if (v != root && best[static_cast<std::size_t>(v)] == kNone) return std::nullopt;
  }

  // Find cycles of the best-incoming-arc graph.
  std::vector<int> cycle_of(static_cast<std::size_t>(n), kNone);
  std::vector<int> mark(static_cast<std::size_t>(n), kNone);
  int num_cycles = 0;
  for (int s = 0; s < n; ++s) {
    int v = s;
    while (v != root && mark[static_cast<std::size_t>(v)] == kNone) {
      mark[static_cast<std::size_t>(v)] = s;
      v = arcs[static_cast<std::size_t>(best[static_cast<std::size_t>(v)])].from;
    }
    if (v != root && mark[static_cast<std::size_t>(v)] == s && cycle_of[static_cast<std::size_t>(v)] == kNone) {
      int u = v;
      do {
        cycle_of[static_cast<std::size_t>(u)] = num_cycles;
        u = arcs[static_cast<std::size_t>(best[static_cast<std::size_t>(u)])].from;
      } while (u != v);
      ++num_cycles;
    }
  }
  if (num_cycles == 0) return best;

  // Contract: cycle c becomes node c, every other node gets a fresh id.
  std::vector<int> id(static_cast<std::size_t>(n));
  int next = num_cycles;
  for (int v = 0; v < n; ++v) {
    const int c = cycle_of[static_cast<std::size_t>(v)];
    id[static_cast<std::size_t>(v)] = c != kNone ? c : next++;
  }
  std::vector<Arc> contracted;
  std::vector<int> origin;
  for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
    const Arc& arc = arcs[static_cast<std::size_t>(a)];
    const int cu = id[static_cast<std::size_t>(arc.from)];
    const int cv = id[static_cast<std::size_t>(arc.to)];
    if (cu == cv || arc.to == root) continue;
    if (cycle_of[static_cast<std::size_t>(arc.to)] != kNone) {
      const Arc& in = arcs[static_cast<std::size_t>(best[static_cast<std::size_t>(arc.to)])];
      contracted.push_back({cu, cv, arc.weight - in.weight, subtract(arc.key, in.key)});
    } else {
      contracted.push_back({cu, cv, arc.weight, arc.key});
    }
    origin.push_back(a);
  }
  auto sub = edmonds(next, contracted, id[static_cast<std::size_t>(root)], tol);
  if (!sub) return std::nullopt;

  std::vector<int> chosen = best;
  for (int c = 0; c < next; ++c) {
    const int a = (*sub)[static_cast<std::size_t>(c)];
    if (a == kNone) continue;
    const int orig = origin[static_cast<std::size_t>(a)];
    chosen[static_cast<std::size_t>(arcs[static_cast<std::size_t>(orig)].to)] = orig;
  }
  return chosen;
}

// Dense (q+1)x(q+1) weight table; NaN marks a missing edge.
class WeightTable {
 public:
  explicit WeightTable(const WeightedTokenGraph& g)
      : n_(static_cast<int>(g.q) + 1),
        w_(static_cast<std::size_t>(n_ * n_), std::numeric_limits<double>::quiet_NaN()) {
    for (const WeightedEdge& e : g.edges) {
      if (e.head < 0 || e.head >= n_ || e.dependent < 1 || e.dependent >= n_ || e.head == e.dependent) {
        throw std::invalid_argument("graph edge (" + std::to_string(e.head) + "," +
                                    std::to_string(e.dependent) + ") is out of range");
      }
      if (!std::isfinite(e.weight)) throw std::invalid_argument("graph edge weight is not finite");
      double& slot = at(e.head, e.dependent);
      if (std::isnan(slot) || e.weight > slot) slot = e.weight;
    }
  }

  int nodes() const { return n_; }
  double& at(int h, int d) { return w_[static_cast<std::size_t>(h * n_ + d)]; }
  double at(int h, int d) const { return w_[static_cast<std::size_t>(h * n_ + d)]; }
  bool has(int h, int d) const { return !std::isnan(at(h, d)); }

  double total(std::span<const int> heads) const {
    double sum = 0.0;
    for (std::size_t d = 0; d < heads.size(); ++d) sum += at(heads[d], static_cast<int>(d + 1));
    return sum;
  }

 private:
  int n_;
  std::vector<double> w_;
};

struct Solution {
  std::vector<int> heads;
  double weight = 0.0;
};

// Heavier wins; within the tie tolerance the smaller head sequence wins.
bool preferred(const Solution& a, const Solution& b) {
  if (!within_tie(a.weight, b.weight)) return false;
  if (!within_tie(b.weight, a.weight)) return true;
  return a.heads < b.heads;
}

class Solver {
 public:
  Solver(const WeightTable& table, bool single_root) : table_(table), single_root_(single_root) {
    double scale = 1.0;
    for (int h = 0; h < table.nodes(); ++h) {
      for (int d = 1; d < table.nodes(); ++d) {
        if (!table.has(h, d)) continue;
        arcs_.push_back({h, d, table.at(h, d), Sparse{{d, -static_cast<long long>(h)}}});
        scale = std::max(scale, std::abs(table.at(h, d)));
      }
    }
    // Contracted weights are sums of up to q+1 arc weights.
    tol_ = kTieTolerance * scale * static_cast<double>(table.nodes());
  }

  std::optional<Solution> solve() const {
    std::vector<int> root_children;
    for (const Arc& a : arcs_) {
      if (a.from == 0) root_children.push_back(a.to);
    }
    if (!single_root_ || root_children.size() <= 1) return run(arcs_);

    // One run per root child with the other root edges removed. A child's
    // tree weighs at most w(0,c) plus the best non-root arc into every other
    // token, so children are tried in decreasing order of that bound and the
    // rest skipped once it drops below the best tree found.
    const int n = table_.nodes();
    std::vector<double> best_in(static_cast<std::size_t>(n), -std::numeric_limits<double>::infinity());
    for (const Arc& a : arcs_) {
      if (a.from != 0) best_in[static_cast<std::size_t>(a.to)] = std::max(best_in[static_cast<std::size_t>(a.to)], a.weight);
    }
    double base = 0.0;
    int unreachable = 0;
    for (int d = 1; d < n; ++d) {
      if (std::isinf(best_in[static_cast<std::size_t>(d)])) {
        ++unreachable;
      } else {
        base += best_in[static_cast<std::size_t>(d)];
      }
    }
    std::vector<std::pair<double, int>> order;
    for (int c : root_children) {
      const double in = best_in[static_cast<std::size_t>(c)];
      // Every token but c needs a non-root head.
      if (unreachable > (std::isinf(in) ? 1 : 0)) continue;
      order.emplace_back(table_.at(0, c) + base - (std::isinf(in) ? 0.0 : in), c);
    }
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    std::optional<Solution> best;
    std::vector<Arc> arcs;
    arcs.reserve(arcs_.size());
    for (const auto& [bound, child] : order) {
      if (best && !within_tie(bound + tol_, best->weight)) break;
      arcs.clear();
      for (const Arc& a : arcs_) {
        if (a.from != 0 || a.to == child) arcs.push_back(a);
      }
      auto s = run(arcs);
      if (s && (!best || preferred(*s, *best))) best = std::move(s);
    }
    return best;
  }

 private:
  std::optional<Solution> run(const std::vector<Arc>& arcs) const {
    auto chosen = edmonds(table_.nodes(), arcs, 0, tol_);
    if (!chosen) return std::nullopt;
    Solution s;
    s.heads.resize(static_cast<std::size_t>(table_.nodes() - 1));
    for (int d = 1; d < table_.nodes(); ++d) {
      s.heads[static_cast<std::size_t>(d - 1)] = arcs[static_cast<std::size_t>((*chosen)[static_cast<std::size_t>(d)])].from;
    }
    s.weight = table_.total(s.heads);
    return s;
  }

  const WeightTable& table_;
  bool single_root_;
  double tol_ = 0.0;
  std::vector<Arc> arcs_;
};

}  // namespace

DepTree max_arborescence(const WeightedTokenGraph& graph, bool single_root) {
  const WeightTable table(graph);
  auto best = Solver(table, single_root).solve();
  if (!best) throw NoArborescence("no spanning arborescence for sentence " + graph.sentence_id);
  return DepTree(std::move(best->heads));
}

DepTree brute_force_arborescence(const WeightedTokenGraph& graph, bool single_root) {
  if (graph.q > 8) throw std::invalid_argument("brute_force_arborescence supports q <= 8");
  const WeightTable table(graph);
  const int q = static_cast<int>(graph.q);
  // Enumerate head sequences in lexicographic order.
  std::vector<int> heads(static_cast<std::size_t>(q), 0);
  std::vector<std::vector<int>> options(static_cast<std::size_t>(q));
  for (int d = 1; d <= q; ++d) {
    for (int h = 0; h <= q; ++h) {
      if (table.has(h, d)) options[static_cast<std::size_t>(d - 1)].push_back(h);
    }
    if (options[static_cast<std::size_t>(d - 1)].empty()) {
      throw NoArborescence("no spanning arborescence for sentence " + graph.sentence_id);
    }
  }
  // Visits valid trees in lexicographic order of head sequence until `visit`
  // returns true.
  auto for_each_tree = [&](auto&& visit) {
    std::vector<std::size_t> pos(static_cast<std::size_t>(q), 0);
    while (true) {
      for (std::size_t d = 0; d < pos.size(); ++d) heads[d] = options[d][pos[d]];
      const auto root_children = std::count(heads.begin(), heads.end(), 0);
      if ((!single_root || root_children == 1) && validate_tree(heads, graph.q).ok()) {
        if (visit(heads, table.total(heads))) return;
      }
      int d = q - 1;
      while (d >= 0 && ++pos[static_cast<std::size_t>(d)] == options[static_cast<std::size_t>(d)].size()) {
        pos[static_cast<std::size_t>(d)] = 0;
        --d;
      }
      if (d < 0) return;
    }
  };

  double best = -std::numeric_limits<double>::infinity();
  for_each_tree([&](const std::vector<int>&, double w) {
    best = std::max(best, w);
    return false;
  });
  std::optional<std::vector<int>> winner;
  for_each_tree([&](const std::vector<int>& h, double w) {
    if (!within_tie(w, best)) return false;
    winner = h;
    return true;
  });
  if (!winner) throw NoArborescence("no spanning arborescence for sentence " + graph.sentence_id);
  return DepTree(std::move(*winner));
}

double tree_weight(const WeightedTokenGraph& graph, const DepTree& tree) {
  if (tree.size() != graph.q) throw std::invalid_argument("tree size does not match graph");
  const WeightTable table(graph);
  for (int d = 1; d <= static_cast<int>(graph.q); ++d) {
    if (!table.has(tree.head(d), d)) {
      throw std::invalid_argument("tree edge (" + std::to_string(tree.head(d)) + "," +
                                  std::to_string(d) + ") is not in the graph");
    }
  }
  return table.total(tree.heads());
}

}  // namespace depagg

namespace depagg {

WeightedTokenGraph sentence_graph(const EdgeUnion& edges, std::size_t i, std::span<const double> scores) {
  if (scores.size() != edges.edges.size()) {
    throw std::invalid_argument("one score per candidate edge is required");
  }
  WeightedTokenGraph g;
  g.sentence_id = std::to_string(i);
  for (std::size_t r = edges.offsets[i]; r < edges.offsets[i + 1]; ++r) {
    const CandidateEdge& e = edges.edges[r];
    g.edges.push_back({e.head, e.dependent, scores[r]});
    g.q = std::max(g.q, static_cast<std::size_t>(e.dependent));
  }
  return g;
}

std::vector<DepTree> decode_sentences(const EdgeUnion& edges, std::span<const double> scores,
                                      bool single_root) {
  std::vector<DepTree> out;
  out.reserve(edges.num_sentences());
  for (std::size_t i = 0; i < edges.num_sentences(); ++i) {
    out.push_back(max_arborescence(sentence_graph(edges, i, scores), single_root));
  }
  return out;
}

}  // namespace depagg
