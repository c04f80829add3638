#include "depagg/crh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "depagg/arborescence.hpp"

namespace depagg::crh {
namespace {

std::size_t sentence_size(const EdgeUnion& edges, std::size_t i) {
  int q = 0;
  for (const auto& e : edges.sentence_edges(i)) q = std::max(q, e.dependent);
  return static_cast<std::size_t>(q);
}

void require_edges(const EdgeLabelMatrix& matrix) {
  if (!matrix.has_edges()) {
    throw std::invalid_argument("tree-UAS distance needs a matrix built from parser trees");
  }
}

std::vector<double> support(std::span<const double> weights, const EdgeLabelMatrix& matrix) {
  std::vector<double> out(matrix.rows(), 0.0);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto row = matrix.row(r);
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (row[k] > 0) out[r] += weights[k];
    }
  }
  return out;
}

}  // namespace

std::vector<double> source_costs(std::span<const Label> truths, const EdgeLabelMatrix& matrix,
                                 const Options& opts) {
  if (truths.size() != matrix.rows()) throw std::invalid_argument("one truth per row is required");
  const std::size_t m = matrix.cols();
  std::vector<double> cost(m, 0.0);
  if (opts.distance == Distance::kEdgeZeroOne) {
    std::vector<long long> wrong(m, 0);
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      const auto row = matrix.row(r);
      for (std::size_t k = 0; k < m; ++k) wrong[k] += row[k] != truths[r];
    }
    for (std::size_t k = 0; k < m; ++k) cost[k] = static_cast<double>(wrong[k]);
  } else {
    require_edges(matrix);
    const EdgeUnion& edges = matrix.edge_union();
    std::vector<int> matches(m);
    for (std::size_t i = 0; i < edges.num_sentences(); ++i) {
      std::fill(matches.begin(), matches.end(), 0);
      for (std::size_t r = edges.offsets[i]; r < edges.offsets[i + 1]; ++r) {
        if (truths[r] < 0) continue;
        const auto row = matrix.row(r);
        for (std::size_t k = 0; k < m; ++k) matches[k] += row[k] > 0;
      }
      const double q = static_cast<double>(sentence_size(edges, i));
      for (std::size_t k = 0; k < m; ++k) cost[k] += 1.0 - matches[k] / q;
    }
  }
  for (double& c : cost) c += opts.epsilon;
  return cost;
}

std::vector<double> weights_from_costs(std::span<const double> costs) {
  const double total = std::accumulate(costs.begin(), costs.end(), 0.0);
  std::vector<double> w(costs.size());
  for (std::size_t k = 0; k < costs.size(); ++k) w[k] = -std::log(costs[k] / total);
  return w;
}

std::vector<double> weight_update(std::span<const Label> truths, const EdgeLabelMatrix& matrix,
                                  const Options& opts) {
  return weights_from_costs(source_costs(truths, matrix, opts));
}

std::vector<Label> truth_update(std::span<const double> weights, const EdgeLabelMatrix& matrix) {
  std::vector<Label> out(matrix.rows());
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto row = matrix.row(r);
    double plus = 0.0;
    double minus = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) (row[k] > 0 ? plus : minus) += weights[k];
    // Cost of answering +1 is the weight voting -1, and vice versa.
    out[r] = minus <= plus ? Label{1} : Label{-1};
  }
  return out;
}

std::vector<Label> tree_truth_update(std::span<const double> weights, const EdgeLabelMatrix& matrix,
                                     bool single_root) {
  require_edges(matrix);
  const EdgeUnion& edges = matrix.edge_union();
  const auto scores = support(weights, matrix);
  const auto best = decode_sentences(edges, scores, single_root);
  std::vector<Label> out(matrix.rows(), Label{-1});
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const CandidateEdge& e = edges.edges[r];
    if (best[e.sentence].head(e.dependent) == e.head) out[r] = 1;
  }
  return out;
}

double objective(std::span<const double> weights, std::span<const Label> truths,
                 const EdgeLabelMatrix& matrix, const Options& opts) {
  const auto cost = source_costs(truths, matrix, opts);
  double f = 0.0;
  for (std::size_t k = 0; k < cost.size(); ++k) f += weights[k] * cost[k];
  return f;
}

State run(const EdgeLabelMatrix& matrix, const Options& opts) {
  if (matrix.cols() < 2) throw std::invalid_argument("CRH needs at least two sources");
  if (!(opts.epsilon > 0.0)) throw std::invalid_argument("CRH epsilon must be positive");
  const bool tree_mode = opts.distance == Distance::kTreeUas;

  State s;
  if (tree_mode) {
    const std::vector<double> equal(matrix.cols(), 1.0);
    s.truths = tree_truth_update(equal, matrix, opts.single_root);
  } else {
    s.truths = majority_vote(matrix);
  }
  double previous = std::numeric_limits<double>::infinity();
  while (s.iterations < opts.max_iterations) {
    ++s.iterations;
    s.weights = weight_update(s.truths, matrix, opts);
    s.objective_trace.push_back(objective(s.weights, s.truths, matrix, opts));

    auto truths = tree_mode ? tree_truth_update(s.weights, matrix, opts.single_root)
                            : truth_update(s.weights, matrix);
    const bool unchanged = truths == s.truths;
    s.truths = std::move(truths);
    s.objective = objective(s.weights, s.truths, matrix, opts);
    s.objective_trace.push_back(s.objective);

    if (unchanged || previous - s.objective < opts.min_decrease) {
      s.converged = true;
      break;
    }
    previous = s.objective;
  }
  return s;
}

std::vector<DepTree> trees(const State& state, const EdgeLabelMatrix& matrix,
                           const ParseEnsemble& ensemble, bool single_root) {
  if (state.weights.size() != matrix.cols()) throw std::invalid_argument("weights do not match matrix");
  if (matrix.edge_union().num_sentences() != ensemble.num_sentences()) {
    throw std::invalid_argument("matrix was built from a different ensemble");
  }
  auto scores = support(state.weights, matrix);
  const double total = std::accumulate(state.weights.begin(), state.weights.end(), 0.0);
  for (double& s : scores) s /= total;
  return decode_sentences(matrix.edge_union(), scores, single_root);
}

}  // namespace depagg::crh
