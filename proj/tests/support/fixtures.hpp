#pragma once

// Builders for treebank fixtures used by the evaluation, CLI and acceptance
// tests, plus reference UAS values for 19 high-resource treebanks.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "depagg/conllu.hpp"
#include "gen.hpp"

namespace testfx {

struct TreebankTexts {
  std::string gold;
  std::vector<std::string> parsers;
};

inline std::string conllu_sentence(const std::string& sid, const std::vector<std::string>& forms,
                                   const depagg::DepTree& tree) {
  std::string out = "# sent_id = " + sid + "\n";
  for (std::size_t t = 0; t < forms.size(); ++t) {
    out += std::to_string(t + 1) + "\t" + forms[t] + "\t_\t_\t_\t_\t" + std::to_string(tree.heads()[t]) +
           "\t_\t_\t_\n";
  }
  return out + "\n";
}

// n sentences for m parsers and a gold file. The first `mismatched` sentences
// have a different segmentation in the last parser, the next `unanimous`
// ones get the same tree from every parser, and the rest have at least two
// distinct parser trees.
inline TreebankTexts preprocess_fixture(std::size_t n, std::size_t mismatched, std::size_t unanimous,
                                        std::size_t m, std::uint64_t seed = 1) {
  testgen::Rng rng(seed);
  TreebankTexts out;
  out.parsers.resize(m);
  for (std::size_t i = 0; i < n; ++i) {
    const int q = rng.uniform_int(3, 7);
    std::vector<std::string> forms;
    for (int t = 1; t <= q; ++t) forms.push_back("w" + std::to_string(i) + "_" + std::to_string(t));
    const std::string sid = "s" + std::to_string(i + 1);
    const auto gold = testgen::random_tree(rng, q);
    out.gold += conllu_sentence(sid, forms, gold);
    for (std::size_t j = 0; j < m; ++j) {
      if (i < mismatched && j + 1 == m) {
        auto split = forms;
        split.back() += "x";
        split.push_back("y");
        out.parsers[j] += conllu_sentence(sid, split, testgen::random_tree(rng, q + 1));
        continue;
      }
      depagg::DepTree t = gold;
      if (i >= mismatched + unanimous && j == 1) {
        // Force disagreement: a chain differs from any tree with a root child
        // other than token 1, and from gold otherwise by its shape.
        std::vector<int> chain(static_cast<std::size_t>(q));
        for (int d = 1; d <= q; ++d) chain[static_cast<std::size_t>(d - 1)] = d - 1;
        t = depagg::DepTree(chain);
        if (t == gold) {
          chain[static_cast<std::size_t>(q - 1)] = 1;
          t = depagg::DepTree(chain);
        }
      } else if (i >= mismatched + unanimous && j > 1 && rng.coin(0.3)) {
        t = testgen::random_tree(rng, q);
      }
      out.parsers[j] += conllu_sentence(sid, forms, t);
    }
  }
  return out;
}

inline void write_texts(const TreebankTexts& tb, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "parsers");
  std::ofstream(dir / "gold.conllu", std::ios::binary) << tb.gold;
  for (std::size_t j = 0; j < tb.parsers.size(); ++j) {
    std::string name = std::to_string(j + 1);
    if (name.size() < 2) name.insert(0, "0");
    std::ofstream(dir / "parsers" / ("p" + name + ".conllu"), std::ios::binary) << tb.parsers[j];
  }
}

inline std::vector<depagg::TreebankFile> parse_parsers(const TreebankTexts& tb) {
  std::vector<depagg::TreebankFile> files;
  for (std::size_t j = 0; j < tb.parsers.size(); ++j) {
    files.push_back(depagg::parse_conllu(tb.parsers[j], "p" + std::to_string(j + 1)));
  }
  return files;
}

// High-resource treebanks, in table order.
inline const std::vector<std::string> kHighTreebanks{
    "bg_btb",     "ca_ancora",  "cs_cac",      "de_gsd",      "en_ewt",   "en_gum",   "en_lines",
    "en_pud",     "es_ancora",  "it_isdt",     "it_postwita", "nl_alpino", "nl_lassysmall", "no_bokmaal",
    "no_nynorsk", "no_nynorsklia", "ro_rrt",   "ru_syntagrus", "ru_taiga"};
inline const std::vector<double> kHighCim{96.1, 94.6, 95.0, 89.9, 93.6, 93.4, 90.4, 92.5, 93.6, 95.5,
                                          95.0, 93.6, 94.1, 94.9, 95.2, 81.3, 94.0, 94.6, 92.8};
inline const std::vector<double> kHighMst{92.1, 92.5, 90.1, 83.3, 88.6, 88.4, 83.3, 87.2, 91.3, 93.1,
                                          92.6, 89.3, 89.7, 91.3, 90.9, 70.5, 91.7, 92.7, 81.5};
inline const std::vector<double> kHighHitScir{91.4, 91.4, 88.5, 83.6, 89.3, 86.9, 84.6, 86.7, 89.8, 92.7,
                                              91.3, 88.6, 88.2, 90.6, 90.1, 70.6, 88.8, 89.9, 77.0};

}  // namespace testfx
