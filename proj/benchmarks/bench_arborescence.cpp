#include <benchmark/benchmark.h>

#include <random>

#include "depagg/arborescence.hpp"

namespace {

depagg::WeightedTokenGraph complete_graph(int q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  depagg::WeightedTokenGraph g;
  g.q = static_cast<std::size_t>(q);
  for (int h = 0; h <= q; ++h) {
    for (int d = 1; d <= q; ++d) {
      if (h != d) g.edges.push_back({h, d, w(rng)});
    }
  }
  return g;
}

void BM_MaxArborescence(benchmark::State& state) {
  const auto g = complete_graph(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(depagg::max_arborescence(g));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaxArborescence)->RangeMultiplier(2)->Range(4, 128)->Complexity();

void BM_MaxArborescenceMultiRoot(benchmark::State& state) {
  const auto g = complete_graph(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(depagg::max_arborescence(g, false));
}
BENCHMARK(BM_MaxArborescenceMultiRoot)->RangeMultiplier(2)->Range(4, 128);

void BM_BruteForce(benchmark::State& state) {
  const auto g = complete_graph(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(depagg::brute_force_arborescence(g));
}
BENCHMARK(BM_BruteForce)->DenseRange(3, 6);

}  // namespace
