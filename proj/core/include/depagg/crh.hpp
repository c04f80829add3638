#pragma once

#include <span>
#include <vector>

#include "depagg/edge_matrix.hpp"
#include "depagg/tree.hpp"

namespace depagg::crh {

enum class Distance {
  kEdgeZeroOne,  // 0-1 loss per candidate edge
  kTreeUas,      // 1 - UAS per sentence against the current aggregated tree
};

struct Options {
  Distance distance = Distance::kEdgeZeroOne;
  int max_iterations = 100;
  double min_decrease = 1e-9;
  double epsilon = 1e-8;  // added to every source cost
  bool single_root = true;  // tree constraint used by kTreeUas truth steps
};

struct State {
  std::vector<double> weights;
  std::vector<Label> truths;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective after every half-step, in order: weight update, truth update, ...
  std::vector<double> objective_trace;
};

/// Per-source costs (sum of distances to the truths, plus epsilon). kTreeUas
/// needs the matrix's edge union, since it reads trees off the +1 labels.
std::vector<double> source_costs(std::span<const Label> truths, const EdgeLabelMatrix& matrix,
                                 const Options& opts);

/// w_k = -log(cost_k / sum cost), the minimizer of sum_k w_k cost_k subject to
/// sum_k exp(-w_k) = 1.
std::vector<double> weights_from_costs(std::span<const double> costs);

std::vector<double> weight_update(std::span<const Label> truths, const EdgeLabelMatrix& matrix,
                                  const Options& opts);

/// Weighted majority per edge; ties go to +1.
std::vector<Label> truth_update(std::span<const double> weights, const EdgeLabelMatrix& matrix);

/// kTreeUas truth step: per sentence, the arborescence maximizing weighted
/// support; an edge is +1 iff it is in that tree.
std::vector<Label> tree_truth_update(std::span<const double> weights, const EdgeLabelMatrix& matrix,
                                     bool single_root = true);

/// sum_k w_k * cost_k for the given truths.
double objective(std::span<const double> weights, std::span<const Label> truths,
                 const EdgeLabelMatrix& matrix, const Options& opts);

/// Block coordinate descent starting from the majority vote (for kTreeUas, the
/// unweighted vote arborescence, so every truth state is a tree). Stops when
/// the truths stop changing, the objective decrease falls below
/// opts.min_decrease, or after opts.max_iterations rounds.
State run(const EdgeLabelMatrix& matrix, const Options& opts = {});

/// One tree per sentence from the normalized weighted support
/// sum_k w_k [L_k(e) = +1] / sum_k w_k.
std::vector<DepTree> trees(const State& state, const EdgeLabelMatrix& matrix,
                           const ParseEnsemble& ensemble, bool single_root = true);

}  // namespace depagg::crh
