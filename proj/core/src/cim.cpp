#include "depagg/cim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "depagg/arborescence.hpp"

namespace depagg::cim {
namespace {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z))
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// log(exp(z) + exp(-z))
double log_two_cosh(double z) {
  const double a = std::abs(z);
  return a + std::log1p(std::exp(-2.0 * a));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Distinct label rows with their relative frequencies. Optionally extended
// with one extra label per row (the majority vote).
struct PatternSet {
  std::vector<std::vector<Label>> rows;
  std::vector<double> frequency;
};

PatternSet compress(const EdgeLabelMatrix& matrix, std::span<const Label> extra = {}) {
  std::map<std::vector<Label>, std::size_t> counts;
  const std::size_t width = matrix.cols();
  std::vector<Label> key(width + (extra.empty() ? 0 : 1));
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto row = matrix.row(r);
    std::copy(row.begin(), row.end(), key.begin());
    if (!extra.empty()) key[width] = extra[r];
    ++counts[key];
  }
  PatternSet out;
  const double n = static_cast<double>(matrix.rows());
  for (const auto& [row, c] : counts) {
    out.rows.push_back(row);
    out.frequency.push_back(static_cast<double>(c) / n);
  }
  return out;
}

// Pairwise second moments E[L_a L_b] of all columns.
std::vector<std::vector<double>> second_moments(const EdgeLabelMatrix& matrix) {
  const std::size_t m = matrix.cols();
  std::vector<std::vector<long long>> acc(m, std::vector<long long>(m, 0));
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    const auto row = matrix.row(r);
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) acc[a][b] += row[a] * row[b];
    }
  }
  std::vector<std::vector<double>> out(m, std::vector<double>(m, 0.0));
  const double n = static_cast<double>(matrix.rows());
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a; b < m; ++b) out[a][b] = out[b][a] = static_cast<double>(acc[a][b]) / n;
  }
  return out;
}

// l1-penalized logistic regression with an unpenalized intercept, solved by
// FISTA with adaptive restart on pooled rows. Features are +-1.
struct SparseLogistic {
  const std::vector<std::vector<double>>& x;  // patterns x features
  const std::vector<double>& y;               // 0/1 per pattern
  const std::vector<double>& w;               // pattern frequency, sums to 1
  double lambda;

  std::size_t dim() const { return x.empty() ? 0 : x.front().size(); }

  // Smooth loss and its gradient; params = (intercept, beta...).
  double loss(const std::vector<double>& p, std::vector<double>* grad) const {
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    double f = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double z = p[0];
      for (std::size_t k = 0; k < dim(); ++k) z += p[k + 1] * x[i][k];
      f += w[i] * (softplus(z) - y[i] * z);
      if (grad) {
        const double r = w[i] * (sigmoid(z) - y[i]);
        (*grad)[0] += r;
        for (std::size_t k = 0; k < dim(); ++k) (*grad)[k + 1] += r * x[i][k];
      }
    }
    return f;
  }

  double penalty(const std::vector<double>& p) const {
    double s = 0.0;
    for (std::size_t k = 1; k < p.size(); ++k) s += std::abs(p[k]);
    return lambda * s;
  }

  // Upper bound on the gradient's Lipschitz constant: 1/4 of the top
  // eigenvalue of the weighted Gram matrix (with intercept column).
  double lipschitz() const {
    const std::size_t d = dim() + 1;
    std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d))), u(d);
    double eig = 0.0;
    for (int it = 0; it < 100; ++it) {
      std::fill(u.begin(), u.end(), 0.0);
      for (std::size_t i = 0; i < x.size(); ++i) {
        double s = v[0];
        for (std::size_t k = 0; k < dim(); ++k) s += v[k + 1] * x[i][k];
        s *= w[i];
        u[0] += s;
        for (std::size_t k = 0; k < dim(); ++k) u[k + 1] += s * x[i][k];
      }
      double norm = 0.0;
      for (double e : u) norm += e * e;
      norm = std::sqrt(norm);
      if (norm == 0.0) break;
      eig = norm;
      for (std::size_t k = 0; k < d; ++k) v[k] = u[k] / norm;
    }
    return 0.25 * eig * 1.05 + 1e-12;
  }

  double kkt(const std::vector<double>& p, const std::vector<double>& g) const {
    double s = g[0] * g[0];
    for (std::size_t k = 1; k < p.size(); ++k) {
      double v;
      if (p[k] != 0.0) {
        v = g[k] + lambda * (p[k] > 0 ? 1.0 : -1.0);
      } else {
        v = std::max(0.0, std::abs(g[k]) - lambda);
      }
      s += v * v;
    }
    return std::sqrt(s);
  }

  std::vector<double> solve(double tol, int max_iter, RegressionFit& fit) const {
    const std::size_t d = dim() + 1;
    const double step = 1.0 / lipschitz();
    std::vector<double> p(d, 0.0), prev(d, 0.0), look(d, 0.0), g(d, 0.0);
    double t = 1.0;
    double f_prev = loss(p, nullptr) + penalty(p);
    for (int it = 1; it <= max_iter; ++it) {
      loss(look, &g);
      prev = p;
      p[0] = look[0] - step * g[0];
      for (std::size_t k = 1; k < d; ++k) {
        const double v = look[k] - step * g[k];
        const double thr = step * lambda;
        p[k] = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
      }
      const double f = loss(p, &g) + penalty(p);
      fit.iterations = it;
      fit.kkt_violation = kkt(p, g);
      if (fit.kkt_violation <= tol) {
        fit.converged = true;
        break;
      }
      if (f > f_prev) {
        // Restart momentum.
        t = 1.0;
        look = p;
      } else {
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t k = 0; k < d; ++k) look[k] = p[k] + (t - 1.0) / t_next * (p[k] - prev[k]);
        t = t_next;
      }
      f_prev = f;
    }
    fit.intercept = p[0];
    return p;
  }
};

}  // namespace

double default_l1_penalty(std::size_t m, std::size_t n) {
  if (n == 0) return 0.1;
  return 0.1 * std::sqrt(std::log(static_cast<double>(std::max<std::size_t>(m, 2))) /
                         static_cast<double>(n));
}

bool CorrelationGraph::connected(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  return std::any_of(edges.begin(), edges.end(),
                     [&](const CorrelationEdge& e) { return e.a == a && e.b == b; });
}

CorrelationGraph estimate_correlation_graph(const EdgeLabelMatrix& matrix, std::span<const Label> mv,
                                            const CorrelationOptions& opts) {
  const std::size_t m = matrix.cols();
  if (mv.size() != matrix.rows()) throw std::invalid_argument("one majority label per row is required");
  CorrelationGraph graph;
  graph.num_sources = m;
  graph.coefficients.assign(m, std::vector<double>(m + 1, 0.0));
  graph.l1_penalty = opts.l1_penalty > 0 ? opts.l1_penalty : default_l1_penalty(m, matrix.rows());
  if (m < 2 || matrix.rows() == 0) return graph;

  const PatternSet patterns = compress(matrix, mv);
  std::vector<bool> constant(m, false);
  for (std::size_t j = 0; j < m; ++j) {
    const Label first = patterns.rows.front()[j];
    constant[j] = std::all_of(patterns.rows.begin(), patterns.rows.end(),
                              [&](const auto& row) { return row[j] == first; });
    if (constant[j]) graph.constant_columns.push_back(j);
  }

  for (std::size_t j = 0; j < m; ++j) {
    if (constant[j]) continue;
    std::vector<std::size_t> features;
    for (std::size_t k = 0; k < m; ++k) {
      if (k != j && !constant[k]) features.push_back(k);
    }
    std::vector<std::vector<double>> x;
    std::vector<double> y;
    for (const auto& row : patterns.rows) {
      std::vector<double> f;
      for (std::size_t k : features) f.push_back(row[k]);
      f.push_back(row[m]);
      x.push_back(std::move(f));
      y.push_back(row[j] > 0 ? 1.0 : 0.0);
    }
    const SparseLogistic problem{x, y, patterns.frequency, graph.l1_penalty};
    RegressionFit fit;
    fit.target = j;
    const auto params = problem.solve(opts.tolerance, opts.max_iterations, fit);
    for (std::size_t f = 0; f < features.size(); ++f) graph.coefficients[j][features[f]] = params[f + 1];
    graph.coefficients[j][m] = params.back();
    graph.fits.push_back(fit);
  }

  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      const double ab = graph.coefficients[a][b];
      const double ba = graph.coefficients[b][a];
      const bool linked = opts.positive_only
                              ? ab > opts.coef_threshold && ba > opts.coef_threshold
                              : std::abs(ab) > opts.coef_threshold && std::abs(ba) > opts.coef_threshold;
      if (linked) {
        graph.edges.push_back({a, b, ab, ba});
      }
    }
  }
  return graph;
}

Collapsed collapse_correlated(const EdgeLabelMatrix& matrix, const CorrelationGraph& graph,
                              std::span<const Label> mv) {
  const std::size_t m = matrix.cols();
  if (graph.num_sources != m) throw std::invalid_argument("correlation graph does not match matrix");
  std::vector<std::size_t> parent(m);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  for (const auto& e : graph.edges) {
    const auto ra = find(e.a), rb = find(e.b);
    if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
  }

  Collapsed out;
  CollapseMap& map = out.map;
  map.component_of.assign(m, 0);
  std::map<std::size_t, std::size_t> root_to_component;
  for (std::size_t j = 0; j < m; ++j) {
    const auto root = find(j);
    auto [it, inserted] = root_to_component.try_emplace(root, map.components.size());
    if (inserted) map.components.emplace_back();
    map.components[it->second].push_back(j);
    map.component_of[j] = it->second;
  }

  std::vector<double> agreement(m, 0.0);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t j = 0; j < m; ++j) agreement[j] += matrix.at(r, j) == mv[r];
  }
  for (const auto& comp : map.components) {
    std::size_t best = comp.front();
    for (std::size_t j : comp) {
      if (agreement[j] > agreement[best]) best = j;
    }
    map.tie_breaker.push_back(best);
  }

  const std::size_t c = map.components.size();
  std::vector<std::string> ids;
  for (const auto& comp : map.components) {
    std::string id;
    for (std::size_t j : comp) id += (id.empty() ? "" : "+") + matrix.parser_ids()[j];
    ids.push_back(std::move(id));
  }
  std::vector<Label> labels(matrix.rows() * c);
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    for (std::size_t k = 0; k < c; ++k) {
      int sum = 0;
      for (std::size_t j : map.components[k]) sum += matrix.at(r, j);
      labels[r * c + k] = sum > 0   ? Label{1}
                          : sum < 0 ? Label{-1}
                                    : matrix.at(r, map.tie_breaker[k]);
    }
  }
  out.matrix = matrix.with_labels(std::move(ids), c, std::move(labels));
  return out;
}

MeanParams estimate_mean_params(const EdgeLabelMatrix& matrix, std::span<const Label> mv,
                                const MeanOptions& opts) {
  const std::size_t m = matrix.cols();
  const std::size_t n = matrix.rows();
  if (n == 0) throw std::invalid_argument("cannot estimate moments from an empty matrix");
  if (mv.size() != n) throw std::invalid_argument("one majority label per row is required");
  MeanParams mu;
  mu.mu_plus.assign(m, 0.0);
  mu.mu0_plus.assign(m, 0.0);
  mu.triplets_used.assign(m, 0);
  std::vector<double> with_mv(m, 0.0);
  double mv_sum = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    mv_sum += mv[r];
    for (std::size_t j = 0; j < m; ++j) {
      mu.mu_plus[j] += matrix.at(r, j);
      with_mv[j] += matrix.at(r, j) * mv[r];
    }
  }
  const double dn = static_cast<double>(n);
  mu.mu00 = mv_sum / dn;
  for (std::size_t j = 0; j < m; ++j) {
    mu.mu_plus[j] /= dn;
    with_mv[j] /= dn;
  }

  auto clamp = [&](double v) { return std::clamp(std::abs(v), opts.clamp_low, opts.clamp_high); };
  if (m < 3) {
    mu.fallback = true;
    for (std::size_t j = 0; j < m; ++j) mu.mu0_plus[j] = clamp(with_mv[j]);
    return mu;
  }

  const auto moments = second_moments(matrix);
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<double> estimates;
    for (std::size_t k = 0; k < m; ++k) {
      if (k == j) continue;
      for (std::size_t l = k + 1; l < m; ++l) {
        if (l == j || std::abs(moments[k][l]) < opts.triplet_min) continue;
        estimates.push_back(std::sqrt(std::abs(moments[j][k] * moments[j][l] / moments[k][l])));
      }
    }
    mu.triplets_used[j] = estimates.size();
    if (estimates.empty()) {
      mu.fallback = true;
      mu.mu0_plus[j] = clamp(with_mv[j]);
    } else {
      mu.mu0_plus[j] = clamp(median(std::move(estimates)));
    }
  }
  return mu;
}

std::vector<PairMoment> pair_moments(const EdgeLabelMatrix& matrix, const CorrelationGraph& graph) {
  std::vector<PairMoment> out;
  if (graph.edges.empty()) return out;
  const auto moments = second_moments(matrix);
  for (const auto& e : graph.edges) out.push_back({e.a, e.b, moments[e.a][e.b]});
  return out;
}

CanonicalObjective::CanonicalObjective(const EdgeLabelMatrix& matrix, double mu00,
                                       std::vector<double> mu0_plus)
    : mu00_(mu00), mu0_plus_(std::move(mu0_plus)) {
  if (mu0_plus_.size() != matrix.cols()) throw std::invalid_argument("one mean parameter per source");
  if (matrix.rows() == 0) throw std::invalid_argument("canonical fit needs at least one row");
  PatternSet p = compress(matrix);
  for (const auto& row : p.rows) patterns_.emplace_back(row.begin(), row.end());
  frequency_ = std::move(p.frequency);
}

double CanonicalObjective::value(std::span<const double> theta) const {
  double f = -theta[0] * mu00_;
  for (std::size_t j = 0; j < mu0_plus_.size(); ++j) f -= theta[j + 1] * mu0_plus_[j];
  for (std::size_t i = 0; i < patterns_.size(); ++i) {
    double z = theta[0];
    for (std::size_t j = 0; j < mu0_plus_.size(); ++j) z += theta[j + 1] * patterns_[i][j];
    f += frequency_[i] * log_two_cosh(z);
  }
  return f;
}

std::vector<double> CanonicalObjective::gradient(std::span<const double> theta) const {
  std::vector<double> g(dimension(), 0.0);
  g[0] = -mu00_;
  for (std::size_t j = 0; j < mu0_plus_.size(); ++j) g[j + 1] = -mu0_plus_[j];
  for (std::size_t i = 0; i < patterns_.size(); ++i) {
    double z = theta[0];
    for (std::size_t j = 0; j < mu0_plus_.size(); ++j) z += theta[j + 1] * patterns_[i][j];
    const double t = frequency_[i] * std::tanh(z);
    g[0] += t;
    for (std::size_t j = 0; j < mu0_plus_.size(); ++j) g[j + 1] += t * patterns_[i][j];
  }
  return g;
}

CanonicalFit fit_canonical_params(const MeanParams& mu, const EdgeLabelMatrix& matrix,
                                  const FitOptions& opts) {
  const CanonicalObjective f(matrix, mu.mu00, mu.mu0_plus);
  const std::size_t d = f.dimension();
  std::vector<double> theta(d, 0.0), trial(d);
  double value = f.value(theta);
  auto grad = f.gradient(theta);
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  };

  CanonicalFit fit;
  double step = 1.0;
  double g2 = norm2(grad);
  while (true) {
    if (std::sqrt(g2) <= opts.tolerance) {
      fit.converged = true;
      break;
    }
    if (fit.iterations >= opts.max_iterations) break;
    ++fit.iterations;
    step *= 2.0;
    double next = 0.0;
    while (true) {
      for (std::size_t k = 0; k < d; ++k) trial[k] = theta[k] - step * grad[k];
      next = f.value(trial);
      if (next <= value - 0.5 * step * g2 || step < 1e-20) break;
      step *= 0.5;
    }
    if (next > value) break;  // no descent possible at machine precision
    theta = trial;
    value = next;
    grad = f.gradient(theta);
    g2 = norm2(grad);
  }
  fit.theta00 = theta[0];
  fit.theta0_plus.assign(theta.begin() + 1, theta.end());
  fit.objective = value;
  fit.gradient_norm = std::sqrt(g2);
  return fit;
}

double infer_score(double theta00, std::span<const double> theta0_plus, std::span<const Label> row) {
  double z = theta00;
  for (std::size_t j = 0; j < row.size(); ++j) z += theta0_plus[j] * row[j];
  return sigmoid(2.0 * z);
}

std::vector<double> infer_scores(double theta00, std::span<const double> theta0_plus,
                                 const EdgeLabelMatrix& matrix) {
  if (theta0_plus.size() != matrix.cols()) throw std::invalid_argument("one theta per source");
  std::vector<double> out(matrix.rows());
  for (std::size_t r = 0; r < out.size(); ++r) out[r] = infer_score(theta00, theta0_plus, matrix.row(r));
  return out;
}

namespace {

double energy(const FullTheta& t, int y, std::span<const Label> l) {
  double e = t.theta00 * y;
  for (std::size_t j = 0; j < l.size(); ++j) {
    e += t.theta_plus[j] * l[j] + t.theta0_plus[j] * l[j] * y;
  }
  for (const auto& p : t.theta_plus_plus) e += p.value * l[p.a] * l[p.b];
  return e;
}

}  // namespace

double joint_probability(const FullTheta& theta, Label y, std::span<const Label> labels) {
  const std::size_t m = theta.theta0_plus.size();
  if (m > 12) throw std::invalid_argument("joint_probability enumerates at most 12 sources");
  if (labels.size() != m || theta.theta_plus.size() != m) {
    throw std::invalid_argument("theta and labels disagree on the number of sources");
  }
  std::vector<double> energies;
  energies.reserve(std::size_t{2} << m);
  std::vector<Label> l(m);
  for (int yy : {-1, 1}) {
    for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
      for (std::size_t j = 0; j < m; ++j) l[j] = (mask >> j) & 1 ? Label{1} : Label{-1};
      energies.push_back(energy(theta, yy, l));
    }
  }
  const double top = *std::max_element(energies.begin(), energies.end());
  double z = 0.0;
  for (double e : energies) z += std::exp(e - top);
  return std::exp(energy(theta, y, labels) - top) / z;
}

double conditional_probability(const FullTheta& theta, std::span<const Label> labels) {
  const double plus = joint_probability(theta, 1, labels);
  const double minus = joint_probability(theta, -1, labels);
  return plus / (plus + minus);
}

Result run(const EdgeLabelMatrix& matrix, const Options& opts) {
  Result res;
  const auto mv = majority_vote(matrix);
  res.graph = estimate_correlation_graph(matrix, mv, opts.correlation);
  if (opts.collapse) {
    auto c = collapse_correlated(matrix, res.graph, mv);
    res.reduced = std::move(c.matrix);
    res.collapse = std::move(c.map);
  } else {
    res.reduced = matrix;
    CorrelationGraph empty;
    empty.num_sources = matrix.cols();
    res.collapse = collapse_correlated(matrix, empty, mv).map;
  }
  const auto reduced_mv = majority_vote(res.reduced);
  res.mean = estimate_mean_params(res.reduced, reduced_mv, opts.mean);
  res.mean.mu_plus_plus = pair_moments(matrix, res.graph);
  res.fit = fit_canonical_params(res.mean, res.reduced, opts.fit);
  res.scores = infer_scores(res.fit.theta00, res.fit.theta0_plus, res.reduced);
  return res;
}

std::vector<DepTree> trees(std::span<const double> scores, const EdgeLabelMatrix& matrix,
                           bool single_root) {
  return decode_sentences(matrix.edge_union(), scores, single_root);
}

}  // namespace depagg::cim
