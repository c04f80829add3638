#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "depagg/cim.hpp"
#include "depagg/conllu.hpp"
#include "depagg/crh.hpp"
#include "depagg/edge_matrix.hpp"
#include "depagg/evaluation.hpp"
#include "depagg/synth.hpp"

namespace depagg::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Rejected : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  std::replace(s.begin(), s.end(), '\r', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

void ensure_parent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

void write_text(const fs::path& path, const std::string& text) {
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

TreebankFile read_file(const fs::path& path, const std::string& id) {
  if (!fs::is_regular_file(path)) throw std::runtime_error("no such file: " + path.string());
  try {
    return read_conllu_file(path, id);
  } catch (const ConlluError& e) {
    throw std::runtime_error(path.string() + ": " + e.what());
  }
}

// Parser files of a directory, sorted by file name; ids are the file stems.
std::vector<TreebankFile> read_parser_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir.string());
  std::vector<fs::path> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".conllu") paths.push_back(entry.path());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) throw std::runtime_error("no .conllu files in " + dir.string());
  std::vector<TreebankFile> files;
  for (const auto& p : paths) files.push_back(read_file(p, p.stem().string()));
  return files;
}

// Keeps the parsers named in a rank output, in its order.
std::vector<TreebankFile> apply_selection(std::vector<TreebankFile> files, const fs::path& selection) {
  const json j = read_json(selection);
  if (!j.contains("selected")) throw std::runtime_error(selection.string() + ": missing \"selected\"");
  std::vector<TreebankFile> out;
  for (const auto& id : j.at("selected").get<std::vector<std::string>>()) {
    auto it = std::find_if(files.begin(), files.end(), [&](const TreebankFile& f) { return f.parser_id == id; });
    if (it == files.end()) throw std::runtime_error("selected parser " + id + " has no file");
    out.push_back(*it);
  }
  return out;
}

void require_aligned(std::span<const TreebankFile> files, const std::string& what) {
  const std::size_t n = files.front().size();
  for (const auto& f : files) {
    if (f.size() != n) {
      throw std::runtime_error(what + ": " + f.parser_id + " has " + std::to_string(f.size()) + " sentences, " +
                               files.front().parser_id + " has " + std::to_string(n));
    }
  }
  const auto agree = check_segmentation(files);
  const auto bad = std::find(agree.begin(), agree.end(), false);
  if (bad != agree.end()) {
    const auto i = static_cast<std::size_t>(bad - agree.begin());
    throw std::runtime_error(what + ": segmentation differs in sentence " + std::to_string(i + 1) +
                             " (run preprocess first)");
  }
}

// Treebank name of a parser directory: its own name, or its parent's when
// it is the "parsers" directory written by preprocess and synth.
std::string treebank_name(const fs::path& dir) {
  fs::path p = dir.lexically_normal();
  if (!p.has_filename()) p = p.parent_path();
  if (p.filename() == "parsers" && p.has_parent_path()) p = p.parent_path();
  return p.filename().string();
}

std::vector<std::string> ids_of(std::span<const TreebankFile> files) {
  std::vector<std::string> ids;
  for (const auto& f : files) ids.push_back(f.parser_id);
  return ids;
}

json to_json(const FilterLog& log) {
  return {{"total", log.total},         {"parsers", log.parsers},       {"seg_dropped", log.seg_dropped},
          {"agree_dropped", log.agree_dropped}, {"surviving", log.surviving}, {"rejected", log.rejected},
          {"reject_reason", log.reject_reason}};
}

// ---------------------------------------------------------------------------

struct PreprocessArgs {
  std::string inputs;
  std::string gold;
  std::string out;
  PreprocessOptions opts;
};

int cmd_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const auto parsers = read_parser_dir(a.inputs);
  const auto gold = read_file(a.gold, "gold");
  std::vector<TreebankFile> all = parsers;
  all.push_back(gold);
  for (const auto& f : all) {
    if (f.size() != gold.size()) {
      throw std::runtime_error(f.parser_id + " has " + std::to_string(f.size()) + " sentences, gold has " +
                               std::to_string(gold.size()));
    }
  }
  const auto result = preprocess(parsers, gold, a.opts);
  const fs::path dir(a.out);
  json log = to_json(result.log);
  json kept = json::array();
  for (std::size_t i : result.kept) kept.push_back(gold.sentences[i].sentence_id);
  log["kept"] = kept;
  write_json(dir / "filter_log.json", log);
  if (result.log.rejected) throw Rejected("treebank rejected: " + result.log.reject_reason);
  write_text(dir / "gold.conllu", write_conllu(result.gold));
  for (const auto& p : result.parsers) write_text(dir / "parsers" / (p.parser_id + ".conllu"), write_conllu(p));
  out << result.log.surviving << " of " << result.log.total << " sentences kept (" << result.log.seg_dropped
      << " segmentation, " << result.log.agree_dropped << " unanimous)\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct RankArgs {
  std::string inputs;
  std::string gold;
  std::string out;
  std::size_t sample_size = 10;
  std::size_t top_k = 9;
  std::uint64_t seed = 0;
};

int cmd_rank(const RankArgs& a, std::ostream& out, std::ostream& err) {
  const auto parsers = read_parser_dir(a.inputs);
  const auto gold = read_file(a.gold, "gold");
  std::vector<TreebankFile> all = parsers;
  all.push_back(gold);
  require_aligned(all, "rank");
  const auto ensemble = make_ensemble(parsers);
  const auto sel = rank_and_select(ensemble, gold.trees, a.sample_size, a.top_k, a.seed);
  if (sel.top_k_exceeds_parsers) {
    err << "depagg: warning: --top-k " << a.top_k << " exceeds the " << parsers.size()
        << " available parsers; keeping all\n";
  }
  json ranking = json::array();
  for (std::size_t j : sel.ranking) {
    ranking.push_back({{"parser", parsers[j].parser_id}, {"sample_uas", sel.sample_uas[j]}});
  }
  json selected = json::array();
  for (std::size_t j : sel.selected) selected.push_back(parsers[j].parser_id);
  json sample = json::array();
  for (std::size_t i : sel.sample) sample.push_back(gold.sentences[i].sentence_id);
  write_json(a.out, {{"selected", selected},
                     {"ranking", ranking},
                     {"sample", sample},
                     {"seed", a.seed},
                     {"sample_size", a.sample_size},
                     {"top_k", a.top_k},
                     {"top_k_exceeds_parsers", sel.top_k_exceeds_parsers}});
  out << "selected " << sel.selected.size() << " of " << parsers.size() << " parsers\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct AggregateArgs {
  std::vector<std::string> inputs;
  std::string method = "mst";
  std::string out;
  std::string select;
  std::string diagnostics;
  std::string crh_distance = "edge";
  int crh_max_iter = 100;
  double crh_eps = 1e-8;
  double cim_l1 = 0.0;
  double cim_coef_threshold = 1.0;
  bool cim_no_collapse = false;
  bool cim_abs_coef = false;
  double cim_triplet_min = 0.01;
};

json cim_diagnostics(const cim::Result& r, const std::vector<std::string>& ids) {
  json edges = json::array();
  for (const auto& e : r.graph.edges) {
    edges.push_back({{"a", ids[e.a]}, {"b", ids[e.b]}, {"coef_ab", e.coef_ab}, {"coef_ba", e.coef_ba}});
  }
  json components = json::array();
  for (const auto& c : r.collapse.components) {
    json members = json::array();
    for (std::size_t j : c) members.push_back(ids[j]);
    components.push_back(members);
  }
  json constant = json::array();
  for (std::size_t j : r.graph.constant_columns) constant.push_back(ids[j]);
  return {{"l1_penalty", r.graph.l1_penalty},
          {"correlation_edges", edges},
          {"constant_columns", constant},
          {"components", components},
          {"mu00", r.mean.mu00},
          {"mu0_plus", r.mean.mu0_plus},
          {"mean_fallback", r.mean.fallback},
          {"theta00", r.fit.theta00},
          {"theta0_plus", r.fit.theta0_plus},
          {"fit_converged", r.fit.converged},
          {"fit_iterations", r.fit.iterations},
          {"fit_gradient_norm", r.fit.gradient_norm}};
}

int cmd_aggregate(const AggregateArgs& a, const CLI::App& sub, std::ostream& out) {
  for (const char* flag : {"--crh-distance", "--crh-max-iter", "--crh-eps"}) {
    if (sub.count(flag) > 0 && a.method != "crh") throw UsageError(std::string(flag) + " requires --method crh");
  }
  for (const char* flag : {"--cim-l1", "--cim-coef-threshold", "--cim-no-collapse", "--cim-triplet-min",
                           "--cim-abs-coef"}) {
    if (sub.count(flag) > 0 && a.method != "cim") throw UsageError(std::string(flag) + " requires --method cim");
  }

  // One treebank per --inputs; several are pooled for parameter estimation.
  std::vector<std::vector<TreebankFile>> banks;
  std::vector<ParseEnsemble> ensembles;
  for (const auto& dir : a.inputs) {
    auto files = read_parser_dir(dir);
    if (!a.select.empty()) files = apply_selection(std::move(files), a.select);
    if (!banks.empty() && ids_of(files) != ids_of(banks.front())) {
      throw std::runtime_error(dir + ": parser files differ from " + a.inputs.front() + "; cannot pool");
    }
    require_aligned(files, dir);
    ensembles.push_back(make_ensemble(files));
    banks.push_back(std::move(files));
  }
  std::vector<std::string> names;
  for (const auto& dir : a.inputs) {
    names.push_back(treebank_name(dir));
    if (banks.size() > 1 && std::count(names.begin(), names.end(), names.back()) > 1) {
      throw UsageError("two --inputs share the treebank name " + names.back());
    }
  }
  const ParseEnsemble pooled = ensembles.size() == 1 ? ensembles.front() : concat_ensembles(ensembles);
  const auto ids = pooled.parser_ids();

  std::vector<DepTree> trees;
  json diag = {{"method", a.method}, {"parsers", ids}, {"n_sentences", pooled.num_sentences()}};
  if (a.method == "mst") {
    trees = vote_mst(pooled);
  } else {
    const auto matrix = label_matrix(pooled);
    diag["n_edges"] = matrix.rows();
    if (a.method == "crh") {
      crh::Options o;
      o.distance = a.crh_distance == "uas" ? crh::Distance::kTreeUas : crh::Distance::kEdgeZeroOne;
      o.max_iterations = a.crh_max_iter;
      o.epsilon = a.crh_eps;
      const auto state = crh::run(matrix, o);
      trees = crh::trees(state, matrix, pooled);
      diag["weights"] = state.weights;
      diag["iterations"] = state.iterations;
      diag["converged"] = state.converged;
      diag["objective"] = state.objective;
      diag["objective_trace"] = state.objective_trace;
    } else {
      cim::Options o;
      o.correlation.l1_penalty = a.cim_l1;
      o.correlation.coef_threshold = a.cim_coef_threshold;
      o.correlation.positive_only = !a.cim_abs_coef;
      o.collapse = !a.cim_no_collapse;
      o.mean.triplet_min = a.cim_triplet_min;
      const auto result = cim::run(matrix, o);
      trees = cim::trees(result.scores, matrix);
      diag.update(cim_diagnostics(result, ids));
    }
  }

  // Write each treebank's predictions into its first parser file's layout.
  std::size_t offset = 0;
  for (std::size_t t = 0; t < banks.size(); ++t) {
    const std::size_t n = ensembles[t].num_sentences();
    const std::span<const DepTree> part(trees.data() + offset, n);
    offset += n;
    fs::path target(a.out);
    if (banks.size() > 1) target /= names[t] + ".conllu";
    write_text(target, write_conllu(banks[t].front(), part));
  }
  if (!a.diagnostics.empty()) write_json(a.diagnostics, diag);
  out << a.method << ": " << pooled.num_sentences() << " sentences from " << banks.size() << " treebank"
      << (banks.size() == 1 ? "" : "s") << ", " << ids.size() << " parsers\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string gold;
  std::vector<std::string> preds;  // name=path
  std::string inputs;
  std::string select;
  std::string filter_log;
  std::string treebank;
  std::string out;
  bool exclude_punct = false;
};

int cmd_evaluate(const EvaluateArgs& a, std::ostream& out) {
  if (a.preds.empty() && a.inputs.empty()) throw UsageError("evaluate needs --pred or --inputs");
  const auto gold = read_file(a.gold, "gold");
  const UasOptions opts{.exclude_punct = a.exclude_punct};
  auto score = [&](const TreebankFile& f) {
    const std::vector<TreebankFile> pair{gold, f};
    require_aligned(pair, f.parser_id);
    return uas(f.trees, gold.trees, opts, gold.sentences);
  };

  TreebankReport r;
  r.treebank = a.treebank.empty() ? fs::path(a.gold).parent_path().filename().string() : a.treebank;
  r.n_sentences = gold.size();
  for (const auto& spec : a.preds) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--pred expects NAME=FILE, got " + spec);
    const std::string name = spec.substr(0, eq);
    r.methods[name] = score(read_file(spec.substr(eq + 1), name));
  }
  if (!a.inputs.empty()) {
    auto parsers = read_parser_dir(a.inputs);
    if (!a.select.empty()) parsers = apply_selection(std::move(parsers), a.select);
    double sum = 0.0;
    for (const auto& p : parsers) {
      const double u = score(p);
      r.methods[p.parser_id] = u;
      sum += u;
    }
    r.methods["average"] = sum / static_cast<double>(parsers.size());
    r.selected_parsers = ids_of(parsers);
  }
  if (!a.filter_log.empty()) {
    const json log = read_json(a.filter_log);
    r.seg_dropped = log.value("seg_dropped", std::size_t{0});
    r.agree_dropped = log.value("agree_dropped", std::size_t{0});
  }
  write_json(a.out, to_json(r));
  for (const auto& [name, u] : r.methods) out << name << "\t" << std::fixed << std::setprecision(2) << u << "\n";
  return kOk;
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> reports;
  std::string groups;
  std::string target = "cim";
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<fs::path> paths;
  for (const auto& p : a.reports) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> inside;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".json") inside.push_back(e.path());
      }
      std::sort(inside.begin(), inside.end());
      paths.insert(paths.end(), inside.begin(), inside.end());
    } else {
      paths.emplace_back(p);
    }
  }
  std::vector<TreebankReport> reports;
  for (const auto& p : paths) {
    try {
      reports.push_back(treebank_report_from_json(read_json(p)));
    } catch (const json::exception& e) {
      throw std::runtime_error(p.string() + ": " + e.what());
    }
  }
  if (reports.empty()) throw std::runtime_error("no treebank reports given");

  // group name -> member treebanks; without a config every report is in "all".
  std::vector<std::pair<std::string, std::vector<TreebankReport>>> groups;
  if (a.groups.empty()) {
    groups.emplace_back("all", reports);
  } else {
    std::set<std::string> placed;
    const json config = read_json(a.groups);
    if (!config.is_object()) throw std::runtime_error(a.groups + ": expected an object of group -> treebanks");
    for (const auto& [name, members] : config.items()) {
      if (!members.is_array()) throw std::runtime_error(a.groups + ": group " + name + " is not a list");
      std::vector<TreebankReport> in;
      for (const auto& tb : members.get<std::vector<std::string>>()) {
        auto it = std::find_if(reports.begin(), reports.end(), [&](const auto& r) { return r.treebank == tb; });
        if (it == reports.end()) {
          err << "depagg: warning: no report for " << tb << " (group " << name << ")\n";
          continue;
        }
        in.push_back(*it);
        placed.insert(tb);
      }
      if (!in.empty()) groups.emplace_back(name, std::move(in));
    }
    for (const auto& r : reports) {
      if (!placed.contains(r.treebank)) err << "depagg: warning: " << r.treebank << " is in no group\n";
    }
    if (groups.empty()) throw std::runtime_error("no group has any report");
  }

  json result = json::array();
  out << std::fixed << std::setprecision(2);
  for (const auto& [name, members] : groups) {
    json g = to_json(summarize_reports(members, name));
    json diffs = json::array();
    const bool has_target = std::all_of(members.begin(), members.end(),
                                  [&](const auto& r) { return r.methods.contains(a.target); });
    if (has_target) {
      for (const auto& d : method_diffs(members, a.target)) {
        diffs.push_back(to_json(d));
        double total = 0.0;
        for (const auto& [tb, v] : d.per_treebank) total += v;
        out << name << "\t" << d.target << " - " << d.baseline << "\t+" << d.positive << " -" << d.negative << " ="
            << d.zero << "\tmean " << total / static_cast<double>(d.per_treebank.size()) << "\n";
      }
    } else {
      err << "depagg: warning: group " << name << " lacks " << a.target << " scores; no diff table\n";
    }
    g["diffs"] = diffs;
    result.push_back(g);
  }
  write_json(a.out, {{"target", a.target}, {"groups", result}});
  return kOk;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  std::string out;
  std::size_t sentences = 200;
  std::size_t min_tokens = 10;
  std::size_t max_tokens = 10;
  std::vector<double> rates;
  std::vector<std::size_t> duplicates;  // 1-based
  std::uint64_t seed = 0;
};

int cmd_synth(const SynthArgs& a, std::ostream& out) {
  synth::Config c;
  c.n_sentences = a.sentences;
  c.min_tokens = a.min_tokens;
  c.max_tokens = a.max_tokens;
  c.corruption = a.rates.empty() ? synth::linear_rates(9, 0.05, 0.40) : a.rates;
  for (std::size_t d : a.duplicates) {
    if (d == 0) throw UsageError("--duplicate is 1-based");
    c.duplicates.push_back({d - 1});
  }
  c.seed = a.seed;
  const auto corpus = synth::generate(c);
  synth::write_corpus(corpus, a.out);
  json acc = json::object();
  for (std::size_t j = 0; j < corpus.parsers.size(); ++j) acc[corpus.parsers[j].parser_id] = corpus.accuracy[j];
  write_json(fs::path(a.out) / "accuracy.json", {{"seed", a.seed}, {"rates", c.corruption}, {"uas", acc}});
  out << "wrote " << corpus.parsers.size() << " parsers x " << a.sentences << " sentences to " << a.out << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dependency parse aggregation", "depagg"};
  app.require_subcommand(1);
  std::function<int()> action;

  PreprocessArgs pre;
  auto* p = app.add_subcommand("preprocess", "Filter sentences and check treebank thresholds");
  p->add_option("--inputs", pre.inputs, "Directory of parser .conllu files")->required();
  p->add_option("--gold", pre.gold, "Gold .conllu file")->required();
  p->add_option("--out", pre.out, "Output directory")->required();
  p->add_option("--min-sentences", pre.opts.min_sentences)->capture_default_str();
  p->add_option("--min-parsers", pre.opts.min_parsers)->capture_default_str();
  p->callback([&] { action = [&] { return cmd_preprocess(pre, out); }; });

  RankArgs rk;
  auto* r = app.add_subcommand("rank", "Rank parsers on a gold sample and keep the top k");
  r->add_option("--inputs", rk.inputs)->required();
  r->add_option("--gold", rk.gold)->required();
  r->add_option("--out", rk.out, "Selection JSON")->required();
  r->add_option("--sample-size", rk.sample_size)->capture_default_str();
  r->add_option("--top-k", rk.top_k)->capture_default_str();
  r->add_option("--seed", rk.seed)->required();
  r->callback([&] { action = [&] { return cmd_rank(rk, out, err); }; });

  AggregateArgs ag;
  auto* g = app.add_subcommand("aggregate", "Aggregate parser outputs into one tree per sentence");
  g->add_option("--inputs", ag.inputs, "Parser directory; repeat to pool treebanks")->required();
  g->add_option("--method", ag.method)->check(CLI::IsMember({"mst", "crh", "cim"}))->capture_default_str();
  g->add_option("--out", ag.out, "Output .conllu (a directory when pooling)")->required();
  g->add_option("--select", ag.select, "Selection JSON from rank");
  g->add_option("--diagnostics", ag.diagnostics, "Write a JSON report of fitted parameters");
  g->add_option("--crh-distance", ag.crh_distance)->check(CLI::IsMember({"edge", "uas"}))->capture_default_str();
  g->add_option("--crh-max-iter", ag.crh_max_iter)->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--crh-eps", ag.crh_eps)->check(CLI::PositiveNumber)->capture_default_str();
  g->add_option("--cim-l1", ag.cim_l1, "l1 penalty; 0 picks 0.1*sqrt(log(m)/n)")->check(CLI::NonNegativeNumber);
  g->add_option("--cim-coef-threshold", ag.cim_coef_threshold)->capture_default_str();
  g->add_flag("--cim-no-collapse", ag.cim_no_collapse);
  g->add_flag("--cim-abs-coef", ag.cim_abs_coef, "Link pairs on |coef| instead of positive coefficients");
  g->add_option("--cim-triplet-min", ag.cim_triplet_min)->check(CLI::NonNegativeNumber)->capture_default_str();
  g->callback([&] { action = [&] { return cmd_aggregate(ag, *g, out); }; });

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Score predictions against gold");
  e->add_option("--gold", ev.gold)->required();
  e->add_option("--pred", ev.preds, "NAME=FILE, repeatable");
  e->add_option("--inputs", ev.inputs, "Parser directory; adds per-parser and average scores");
  e->add_option("--select", ev.select, "Selection JSON restricting --inputs");
  e->add_option("--filter-log", ev.filter_log);
  e->add_option("--treebank", ev.treebank);
  e->add_option("--out", ev.out)->required();
  e->add_flag("--exclude-punct", ev.exclude_punct);
  e->callback([&] { action = [&] { return cmd_evaluate(ev, out); }; });

  ReportArgs rp;
  auto* t = app.add_subcommand("report", "Summaries per resource group and method differences");
  t->add_option("reports", rp.reports, "Treebank report JSON files or directories")->required();
  t->add_option("--groups", rp.groups, "JSON object: group name -> treebank names");
  t->add_option("--target", rp.target)->capture_default_str();
  t->add_option("--out", rp.out)->required();
  t->callback([&] { action = [&] { return cmd_report(rp, out, err); }; });

  SynthArgs sy;
  auto* s = app.add_subcommand("synth", "Generate a synthetic corpus with known parser accuracy");
  s->add_option("--out", sy.out)->required();
  s->add_option("--sentences", sy.sentences)->capture_default_str();
  s->add_option("--min-tokens", sy.min_tokens)->capture_default_str();
  s->add_option("--max-tokens", sy.max_tokens)->capture_default_str();
  s->add_option("--rates", sy.rates, "Corruption rates (default: 9 over 0.05..0.40)")->delimiter(',');
  s->add_option("--duplicate", sy.duplicates, "Append a copy of parser N (1-based)");
  s->add_option("--seed", sy.seed)->required();
  s->callback([&] { action = [&] { return cmd_synth(sy, out); }; });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    if (ex.get_exit_code() == 0) return app.exit(ex, out, err);  // --help
    err << "depagg: " << one_line(ex.what()) << "\n";
    return kUsage;
  }

  try {
    return action();
  } catch (const UsageError& ex) {
    err << "depagg: " << one_line(ex.what()) << "\n";
    return kUsage;
  } catch (const Rejected& ex) {
    err << "depagg: " << one_line(ex.what()) << "\n";
    return kRejected;
  } catch (const std::exception& ex) {
    err << "depagg: " << one_line(ex.what()) << "\n";
    return kInput;
  }
}

}  // namespace depagg::cli
