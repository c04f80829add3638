#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "depagg/conllu.hpp"
#include "depagg/tree.hpp"

namespace depagg::synth {

struct Duplicate {
  std::size_t source = 0;  // copied parser (0-based, among the noisy parsers)
};

struct Config {
  std::size_t n_sentences = 200;
  std::size_t min_tokens = 10;
  std::size_t max_tokens = 10;
  std::vector<double> corruption;    // per noisy parser, each in [0, 1)
  std::vector<Duplicate> duplicates;  // appended after the noisy parsers
  std::uint64_t seed = 0;
};

/// n rates evenly spaced over [lo, hi].
std::vector<double> linear_rates(std::size_t n, double lo, double hi);

struct Corpus {
  TreebankFile gold;
  std::vector<TreebankFile> parsers;
  ParseEnsemble ensemble;
  std::vector<double> accuracy;  // measured UAS vs gold, percent, per parser
};

/// Random single-root gold trees. Each parser marks a uniformly random
/// round(rate * total tokens) of the tokens wrong and draws a uniform wrong
/// head for each, redrawing
/// until the heads form a tree; after 100 failed draws the tree is repaired
/// with max_arborescence over the preferences. Every sentence and
/// every (sentence, parser) pair draws from its own seed derived from
/// config.seed, so output is deterministic. Throws std::invalid_argument on
/// an infeasible config.
Corpus generate(const Config& config);

/// Uniformly random tree over q tokens with exactly one root child.
DepTree random_tree(std::size_t q, std::uint64_t seed);

/// Writes gold.conllu and p01.conllu, p02.conllu, ... into dir/parsers.
void write_corpus(const Corpus& corpus, const std::filesystem::path& dir);

}  // namespace depagg::synth
