#include <benchmark/benchmark.h>

#include <map>

#include "depagg/cim.hpp"
#include "depagg/crh.hpp"
#include "depagg/edge_matrix.hpp"
#include "depagg/evaluation.hpp"
#include "depagg/synth.hpp"

namespace {

const depagg::synth::Corpus& corpus(std::size_t sentences) {
  static std::map<std::size_t, depagg::synth::Corpus> cache;
  auto it = cache.find(sentences);
  if (it == cache.end()) {
    depagg::synth::Config c;
    c.n_sentences = sentences;
    c.min_tokens = 5;
    c.max_tokens = 30;
    c.corruption = depagg::synth::linear_rates(9, 0.05, 0.40);
    c.seed = 7;
    it = cache.emplace(sentences, depagg::synth::generate(c)).first;
  }
  return it->second;
}

void BM_LabelMatrix(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(depagg::label_matrix(c.ensemble));
}
BENCHMARK(BM_LabelMatrix)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_VoteMst(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(depagg::vote_mst(c.ensemble));
}
BENCHMARK(BM_VoteMst)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_Crh(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  const auto matrix = depagg::label_matrix(c.ensemble);
  for (auto _ : state) benchmark::DoNotOptimize(depagg::crh::run(matrix));
}
BENCHMARK(BM_Crh)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_CimPipeline(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  const auto matrix = depagg::label_matrix(c.ensemble);
  for (auto _ : state) {
    const auto result = depagg::cim::run(matrix);
    benchmark::DoNotOptimize(depagg::cim::trees(result.scores, matrix));
  }
}
BENCHMARK(BM_CimPipeline)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_CorrelationGraph(benchmark::State& state) {
  const auto& c = corpus(static_cast<std::size_t>(state.range(0)));
  const auto matrix = depagg::label_matrix(c.ensemble);
  const auto mv = depagg::majority_vote(matrix);
  for (auto _ : state) benchmark::DoNotOptimize(depagg::cim::estimate_correlation_graph(matrix, mv));
}
BENCHMARK(BM_CorrelationGraph)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond);

}  // namespace
