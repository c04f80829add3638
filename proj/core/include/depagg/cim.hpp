#pragma once

#include <span>
#include <string>
#include <vector>

#include "depagg/edge_matrix.hpp"
#include "depagg/tree.hpp"

// Customized Ising model over edge labels: parsers are labeling sources, the
// latent truth Y is whether a candidate edge belongs to the correct tree.
namespace depagg::cim {

// ---------------------------------------------------------------------------
// Correlation structure between sources.

struct CorrelationOptions {
  double l1_penalty = 0.0;  // <= 0 selects default_l1_penalty(m, n)
  double coef_threshold = 1.0;
  // Link only positively dependent pairs. Conditioning on the majority-vote
  // feature makes independent parsers look negatively dependent.
  bool positive_only = true;
  double tolerance = 1e-6;
  int max_iterations = 2000;
};

/// 0.1 * sqrt(log(m) / n).
double default_l1_penalty(std::size_t m, std::size_t n);

struct CorrelationEdge {
  std::size_t a = 0;
  std::size_t b = 0;  // a < b
  double coef_ab = 0.0;  // coefficient of b when regressing a
  double coef_ba = 0.0;
};

struct RegressionFit {
  std::size_t target = 0;
  double intercept = 0.0;
  int iterations = 0;
  double kkt_violation = 0.0;
  bool converged = false;
};

// Undirected graph over the matrix columns. The truth node is implicit.
struct CorrelationGraph {
  std::size_t num_sources = 0;
  double l1_penalty = 0.0;
  std::vector<CorrelationEdge> edges;
  // coefficients[j][k]: weight of column k in the regression for column j
  // (0 for k == j or excluded columns). The last entry of each row is the
  // majority-vote feature.
  std::vector<std::vector<double>> coefficients;
  std::vector<std::size_t> constant_columns;
  std::vector<RegressionFit> fits;

  bool connected(std::size_t a, std::size_t b) const;
};

/// Neighborhood selection: an l1-penalized logistic regression per column on
/// the other columns plus the majority vote; (j,k) is an edge iff both
/// directed coefficients exceed coef_threshold (in magnitude when
/// positive_only is off). Constant columns take part in no regression.
CorrelationGraph estimate_correlation_graph(const EdgeLabelMatrix& matrix, std::span<const Label> mv,
                                            const CorrelationOptions& opts = {});

// ---------------------------------------------------------------------------
// Collapsing correlated sources.

struct CollapseMap {
  // Components of the correlation graph, each sorted, ordered by first member.
  std::vector<std::vector<std::size_t>> components;
  std::vector<std::size_t> component_of;  // original column -> component
  // Member deciding within-component ties: best agreement with the global
  // majority vote, lowest index on equal agreement.
  std::vector<std::size_t> tie_breaker;
};

struct Collapsed {
  EdgeLabelMatrix matrix;
  CollapseMap map;
};

/// Each connected component becomes one column holding the within-component
/// majority vote.
Collapsed collapse_correlated(const EdgeLabelMatrix& matrix, const CorrelationGraph& graph,
                              std::span<const Label> mv);

// ---------------------------------------------------------------------------
// Parameters.

struct MeanOptions {
  double triplet_min = 0.01;  // skip triplets whose denominator is below this
  double clamp_low = 0.001;
  double clamp_high = 0.999;
};

struct PairMoment {
  std::size_t a = 0;
  std::size_t b = 0;
  double value = 0.0;
};

struct MeanParams {
  double mu00 = 0.0;                 // E[Y], from the majority vote
  std::vector<double> mu_plus;       // E[L_j]
  std::vector<double> mu0_plus;      // E[L_j Y]
  std::vector<PairMoment> mu_plus_plus;  // E[L_j L_k] on correlation edges
  bool fallback = false;             // fewer than 3 sources: E[L_j * mv] used
  std::vector<std::size_t> triplets_used;
};

/// Triplet method: |E[L_j Y]| is the median over pairs (k,l) of
/// sqrt(|m_jk m_jl / m_kl|) with m_ab the empirical mean of L_a L_b, sign
/// taken positive, clamped into [clamp_low, clamp_high].
MeanParams estimate_mean_params(const EdgeLabelMatrix& matrix, std::span<const Label> mv,
                                const MeanOptions& opts = {});

/// Empirical E[L_a L_b] for each edge of `graph`.
std::vector<PairMoment> pair_moments(const EdgeLabelMatrix& matrix, const CorrelationGraph& graph);

struct FitOptions {
  double tolerance = 1e-6;  // on the gradient norm
  int max_iterations = 5000;
};

struct CanonicalFit {
  double theta00 = 0.0;
  std::vector<double> theta0_plus;
  double objective = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Objective of the canonical-parameter fit:
//   F = -t00 mu00 - t0.mu0 + (1/n) sum_i log(exp(z_i) + exp(-z_i)),
//   z_i = t00 + t0.L(x_i).
// Rows with identical labels are pooled, so evaluation costs O(#patterns).
class CanonicalObjective {
 public:
  CanonicalObjective(const EdgeLabelMatrix& matrix, double mu00, std::vector<double> mu0_plus);

  std::size_t dimension() const { return mu0_plus_.size() + 1; }
  /// theta = (t00, t0_1, ..., t0_m).
  double value(std::span<const double> theta) const;
  std::vector<double> gradient(std::span<const double> theta) const;

 private:
  double mu00_;
  std::vector<double> mu0_plus_;
  std::vector<std::vector<double>> patterns_;
  std::vector<double> frequency_;
};

/// Gradient descent with backtracking line search from theta = 0. Returns the
/// best iterate with converged = false if the cap is reached.
CanonicalFit fit_canonical_params(const MeanParams& mu, const EdgeLabelMatrix& matrix,
                                  const FitOptions& opts = {});

/// P(Y = 1 | L) = sigmoid(2 t00 + 2 t0.L) per row.
std::vector<double> infer_scores(double theta00, std::span<const double> theta0_plus,
                                 const EdgeLabelMatrix& matrix);
double infer_score(double theta00, std::span<const double> theta0_plus, std::span<const Label> row);

// ---------------------------------------------------------------------------
// Exact joint distribution, for testing.

struct FullTheta {
  double theta00 = 0.0;
  std::vector<double> theta_plus;   // theta_jj
  std::vector<double> theta0_plus;  // theta_0j
  std::vector<PairMoment> theta_plus_plus;  // theta_jk on correlated pairs
};

/// P(Y = y, L = labels) with the partition function by enumeration of all
/// 2^(m+1) states. Throws std::invalid_argument for m > 12.
double joint_probability(const FullTheta& theta, Label y, std::span<const Label> labels);

/// P(Y = 1 | L = labels) from two joint_probability evaluations.
double conditional_probability(const FullTheta& theta, std::span<const Label> labels);

// ---------------------------------------------------------------------------
// Pipeline.

struct Options {
  CorrelationOptions correlation;
  bool collapse = true;
  MeanOptions mean;
  FitOptions fit;
};

struct Result {
  CorrelationGraph graph;
  CollapseMap collapse;
  EdgeLabelMatrix reduced;
  MeanParams mean;
  CanonicalFit fit;
  std::vector<double> scores;  // per row of the input matrix
};

/// Majority vote, correlation graph, collapse, then the majority vote of the
/// collapsed matrix feeds the moment estimates, canonical fit and inference.
Result run(const EdgeLabelMatrix& matrix, const Options& opts = {});

/// One tree per sentence, candidate edges weighted by their scores.
std::vector<DepTree> trees(std::span<const double> scores, const EdgeLabelMatrix& matrix,
                           bool single_root = true);

}  // namespace depagg::cim
