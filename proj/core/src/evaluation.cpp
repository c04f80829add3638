#include "depagg/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include "depagg/arborescence.hpp"
#include "depagg/edge_matrix.hpp"

namespace depagg {
namespace {

// Unbiased draw in [0, n) from a standard engine; std distributions are not
// portable across library implementations.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = rng();
    if (r >= threshold) return r % n;
  }
}

}  // namespace

Preprocessed preprocess(std::span<const TreebankFile> parsers, const TreebankFile& gold,
                        const PreprocessOptions& opts) {
  Preprocessed out;
  FilterLog& log = out.log;
  log.total = gold.size();
  log.parsers = parsers.size();
  if (parsers.size() < opts.min_parsers) {
    log.rejected = true;
    log.reject_reason = "only " + std::to_string(parsers.size()) + " parsers (minimum " +
                        std::to_string(opts.min_parsers) + ")";
    return out;
  }

  std::vector<TreebankFile> all(parsers.begin(), parsers.end());
  all.push_back(gold);
  const auto agree = check_segmentation(all);

  for (std::size_t i = 0; i < agree.size(); ++i) {
    if (!agree[i]) {
      ++log.seg_dropped;
      continue;
    }
    const DepTree& first = parsers.front().trees[i];
    const bool unanimous = std::all_of(parsers.begin(), parsers.end(),
                                       [&](const TreebankFile& f) { return f.trees[i] == first; });
    if (unanimous) {
      ++log.agree_dropped;
      continue;
    }
    out.kept.push_back(i);
  }
  log.surviving = out.kept.size();
  if (log.surviving < opts.min_sentences) {
    log.rejected = true;
    log.reject_reason = "only " + std::to_string(log.surviving) + " sentences survive filtering (minimum " +
                        std::to_string(opts.min_sentences) + ")";
  }
  out.gold = select_sentences(gold, out.kept);
  for (const auto& p : parsers) out.parsers.push_back(select_sentences(p, out.kept));
  out.ensemble = make_ensemble(out.parsers);
  return out;
}

double uas(std::span<const DepTree> pred, std::span<const DepTree> gold, const UasOptions& opts,
           std::span<const Sentence> gold_sentences) {
  if (pred.empty()) throw std::invalid_argument("uas: no sentences to score");
  if (pred.size() != gold.size()) throw std::invalid_argument("uas: sentence counts differ");
  if (opts.exclude_punct && gold_sentences.size() != gold.size()) {
    throw std::invalid_argument("uas: punctuation filtering needs the gold sentences");
  }
  long long correct = 0;
  long long total = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].size() != gold[i].size()) {
      throw std::invalid_argument("uas: token counts differ in sentence " + std::to_string(i));
    }
    for (int d = 1; d <= static_cast<int>(gold[i].size()); ++d) {
      if (opts.exclude_punct &&
          gold_sentences[i].tokens[static_cast<std::size_t>(d - 1)].column(Column::kUpos) == "PUNCT") {
        continue;
      }
      ++total;
      correct += pred[i].head(d) == gold[i].head(d);
    }
  }
  if (total == 0) throw std::invalid_argument("uas: no tokens to score");
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

Selection rank_and_select(const ParseEnsemble& ensemble, std::span<const DepTree> gold,
                          std::size_t sample_size, std::size_t top_k, std::uint64_t seed) {
  const std::size_t n = ensemble.num_sentences();
  if (gold.size() != n) throw std::invalid_argument("rank_and_select: gold does not match ensemble");
  if (n == 0) throw std::invalid_argument("rank_and_select: no sentences");
  Selection sel;
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t k = std::min(sample_size, n);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  sel.sample.assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(sel.sample.begin(), sel.sample.end());

  std::vector<DepTree> gold_sample;
  for (std::size_t i : sel.sample) gold_sample.push_back(gold[i]);
  for (std::size_t j = 0; j < ensemble.num_parsers(); ++j) {
    std::vector<DepTree> pred;
    for (std::size_t i : sel.sample) pred.push_back(ensemble.tree(i, j));
    sel.sample_uas.push_back(uas(pred, gold_sample));
  }
  sel.ranking.resize(ensemble.num_parsers());
  std::iota(sel.ranking.begin(), sel.ranking.end(), 0);
  std::stable_sort(sel.ranking.begin(), sel.ranking.end(),
                   [&](std::size_t a, std::size_t b) { return sel.sample_uas[a] > sel.sample_uas[b]; });
  sel.top_k_exceeds_parsers = top_k > ensemble.num_parsers();
  sel.selected.assign(sel.ranking.begin(),
                      sel.ranking.begin() + static_cast<std::ptrdiff_t>(std::min(top_k, sel.ranking.size())));
  return sel;
}

std::vector<DepTree> vote_mst(const ParseEnsemble& ensemble, bool single_root) {
  const auto matrix = label_matrix(ensemble);
  std::vector<double> votes(matrix.rows());
  for (std::size_t r = 0; r < votes.size(); ++r) votes[r] = positive_votes(matrix, r);
  return decode_sentences(matrix.edge_union(), votes, single_root);
}

nlohmann::json to_json(const TreebankReport& r) {
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& [name, v] : r.methods) methods[name] = v;
  return {
      {"treebank", r.treebank},
      {"n_sentences", r.n_sentences},
      {"methods", methods},
      {"selected_parsers", r.selected_parsers},
      {"filters", {{"seg_dropped", r.seg_dropped}, {"agree_dropped", r.agree_dropped}}},
  };
}

TreebankReport treebank_report_from_json(const nlohmann::json& j) {
  TreebankReport r;
  r.treebank = j.at("treebank").get<std::string>();
  r.n_sentences = j.at("n_sentences").get<std::size_t>();
  for (const auto& [name, v] : j.at("methods").items()) {
    const double u = v.get<double>();
    if (u < 0.0 || u > 100.0) throw std::invalid_argument("UAS out of range for " + name);
    r.methods[name] = u;
  }
  if (j.contains("selected_parsers")) r.selected_parsers = j.at("selected_parsers").get<std::vector<std::string>>();
  if (j.contains("filters")) {
    r.seg_dropped = j.at("filters").value("seg_dropped", std::size_t{0});
    r.agree_dropped = j.at("filters").value("agree_dropped", std::size_t{0});
  }
  return r;
}

SummaryStats summarize(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: no values");
  SummaryStats s;
  s.count = values.size();
  const double n = static_cast<double>(values.size());
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t h = sorted.size() / 2;
  s.median = sorted.size() % 2 == 1 ? sorted[h] : 0.5 * (sorted[h - 1] + sorted[h]);
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / n);
  return s;
}

SummaryReport summarize_reports(std::span<const TreebankReport> reports, const std::string& group) {
  if (reports.empty()) throw std::invalid_argument("summarize_reports: no treebanks");
  SummaryReport out;
  out.group = group;
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : reports) {
    for (const auto& [name, v] : r.methods) values[name].push_back(v);
  }
  for (const auto& [name, v] : values) out.methods[name] = summarize(v);
  return out;
}

nlohmann::json to_json(const SummaryReport& s) {
  nlohmann::json methods = nlohmann::json::object();
  for (const auto& [name, st] : s.methods) {
    methods[name] = {{"mu", st.mean}, {"median", st.median}, {"sigma", st.stddev}, {"n", st.count}};
  }
  return {{"group", s.group}, {"methods", methods}};
}

MethodDiff method_diff(std::span<const TreebankReport> reports, const std::string& target,
                       const std::string& baseline) {
  MethodDiff d;
  d.target = target;
  d.baseline = baseline;
  for (const auto& r : reports) {
    const auto t = r.methods.find(target);
    const auto b = r.methods.find(baseline);
    if (t == r.methods.end() || b == r.methods.end()) {
      throw std::invalid_argument("treebank " + r.treebank + " lacks a score for " +
                                  (t == r.methods.end() ? target : baseline));
    }
    const double diff = t->second - b->second;
    d.per_treebank.emplace_back(r.treebank, diff);
    if (diff > 0) {
      ++d.positive;
    } else if (diff < 0) {
      ++d.negative;
    } else {
      ++d.zero;
    }
  }
  return d;
}

std::vector<MethodDiff> method_diffs(std::span<const TreebankReport> reports, const std::string& target) {
  std::vector<MethodDiff> out;
  if (reports.empty()) return out;
  std::set<std::string> common;
  for (const auto& [name, v] : reports.front().methods) common.insert(name);
  for (const auto& r : reports) {
    std::erase_if(common, [&](const std::string& name) { return !r.methods.contains(name); });
  }
  if (!common.contains(target)) {
    throw std::invalid_argument("method " + target + " is missing from some treebank reports");
  }
  for (const auto& name : common) {
    if (name != target) out.push_back(method_diff(reports, target, name));
  }
  return out;
}

nlohmann::json to_json(const MethodDiff& d) {
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [tb, v] : d.per_treebank) per[tb] = v;
  return {{"target", d.target},   {"baseline", d.baseline}, {"per_treebank", per},
          {"positive", d.positive}, {"negative", d.negative}, {"zero", d.zero}};
}

}  // namespace depagg
