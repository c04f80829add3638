#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "depagg/conllu.hpp"
#include "depagg/tree.hpp"

namespace depagg {

// ---------------------------------------------------------------------------
// Preprocessing

struct PreprocessOptions {
  std::size_t min_sentences = 50;
  std::size_t min_parsers = 9;
};

struct FilterLog {
  std::size_t total = 0;
  std::size_t seg_dropped = 0;
  std::size_t agree_dropped = 0;
  std::size_t surviving = 0;
  std::size_t parsers = 0;
  bool rejected = false;
  std::string reject_reason;
};

struct Preprocessed {
  ParseEnsemble ensemble;
  TreebankFile gold;                  // surviving sentences only
  std::vector<TreebankFile> parsers;  // surviving sentences only
  std::vector<std::size_t> kept;      // indices into the input sentences
  FilterLog log;
};

/// Drops sentences whose segmentation differs across the parsers and the gold
/// file, then sentences on which every parser outputs the same tree. The
/// treebank is rejected (log.rejected, not an exception) when fewer than
/// min_parsers files or fewer than min_sentences surviving sentences remain.
Preprocessed preprocess(std::span<const TreebankFile> parsers, const TreebankFile& gold,
                        const PreprocessOptions& opts = {});

// ---------------------------------------------------------------------------
// Scoring

struct UasOptions {
  bool exclude_punct = false;  // skip tokens whose gold UPOS is PUNCT
};

/// 100 * matching heads / scored tokens. Throws std::invalid_argument on an
/// empty input or mismatched sizes. `gold_sentences` is needed only when
/// punctuation is excluded.
double uas(std::span<const DepTree> pred, std::span<const DepTree> gold, const UasOptions& opts = {},
           std::span<const Sentence> gold_sentences = {});

struct Selection {
  std::vector<std::size_t> sample;    // sentence indices, ascending
  std::vector<double> sample_uas;     // per input parser
  std::vector<std::size_t> ranking;   // all parsers, best first
  std::vector<std::size_t> selected;  // first top_k of ranking
  bool top_k_exceeds_parsers = false;
};

/// Uniform sample of `sample_size` sentences (all if fewer) drawn with a
/// portable seeded generator, parsers ranked by UAS on the sample (ties keep
/// input order), top_k kept.
Selection rank_and_select(const ParseEnsemble& ensemble, std::span<const DepTree> gold,
                          std::size_t sample_size, std::size_t top_k, std::uint64_t seed);

/// Unweighted baseline: candidate edge weight = number of parsers proposing it.
std::vector<DepTree> vote_mst(const ParseEnsemble& ensemble, bool single_root = true);

// ---------------------------------------------------------------------------
// Reports

struct TreebankReport {
  std::string treebank;
  std::size_t n_sentences = 0;
  std::map<std::string, double> methods;  // method or parser name -> UAS
  std::vector<std::string> selected_parsers;
  std::size_t seg_dropped = 0;
  std::size_t agree_dropped = 0;
};

nlohmann::json to_json(const TreebankReport& r);
TreebankReport treebank_report_from_json(const nlohmann::json& j);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double stddev = 0.0;  // population
};

/// Throws std::invalid_argument on empty input.
SummaryStats summarize(std::span<const double> values);

struct SummaryReport {
  std::string group;  // "high" / "low" / user-defined
  std::map<std::string, SummaryStats> methods;
};

/// Per-method summary over the reports; a method missing from any report is
/// summarized over the reports that have it.
SummaryReport summarize_reports(std::span<const TreebankReport> reports, const std::string& group);
nlohmann::json to_json(const SummaryReport& s);

struct MethodDiff {
  std::string target;
  std::string baseline;
  std::vector<std::pair<std::string, double>> per_treebank;  // target - baseline
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
};

/// target - baseline per treebank. Throws std::invalid_argument when a
/// report lacks either method.
MethodDiff method_diff(std::span<const TreebankReport> reports, const std::string& target,
                       const std::string& baseline);

/// method_diff against every other method present in all reports.
std::vector<MethodDiff> method_diffs(std::span<const TreebankReport> reports,
                                     const std::string& target = "cim");
nlohmann::json to_json(const MethodDiff& d);

}  // namespace depagg
