#include <benchmark/benchmark.h>

#include <string>

#include "zspa/harness.hpp"
#include "zspa/pipeline.hpp"
#include "zspa/selection.hpp"

namespace {

zspa::Scenario make_scenario(std::size_t tokens, std::size_t dim) {
  zspa::ScenarioParams p;
  p.tokens = tokens;
  p.dim = dim;
  p.prompt_tokens = 32;
  return zspa::generate_scenario(p, 42);
}

void label(benchmark::State& state, std::size_t n, std::size_t d) {
  state.SetLabel(std::to_string(n) + "x" + std::to_string(d));
}

static void BM_ZspaPrune(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto s = make_scenario(n, d);
  zspa::PruneConfig config;
  config.prune_rate = 0.9;
  config.ratio = 0.4;

  for (auto _ : state) {
    auto r = zspa::zspa_prune(s.prompt, s.visual, config);
    benchmark::DoNotOptimize(r.kept_indices.data());
  }
  label(state, n, d);
}

static void BM_DivPrune(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto s = make_scenario(n, d);
  const auto budget = zspa::compute_budget(n, 0.9);

  for (auto _ : state) {
    auto r = zspa::baseline_divprune(s.visual, budget);
    benchmark::DoNotOptimize(r.kept_indices.data());
  }
  label(state, n, d);
}

static void BM_RelevanceScores(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto s = make_scenario(n, d);
  const auto pooled = zspa::mean_pool(s.prompt);

  for (auto _ : state) {
    auto scores = zspa::relevance_scores(pooled, s.visual);
    benchmark::DoNotOptimize(scores.scores.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
  label(state, n, d);
}

static void BM_GreedyExtend(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto d = static_cast<std::size_t>(state.range(1));
  const auto steps = static_cast<std::size_t>(state.range(2));
  const auto s = make_scenario(n, d);
  const auto scores = zspa::relevance_scores(zspa::mean_pool(s.prompt), s.visual);
  const auto core = zspa::top_k_select(scores.scores, 8);

  for (auto _ : state) {
    auto out = zspa::greedy_diversity_extend(s.visual, zspa::SelectionState::with_core(n, core),
                                             steps);
    benchmark::DoNotOptimize(out.selected.data());
  }
  label(state, n, d);
}

static void BM_Dot(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  const auto s = make_scenario(2, d);
  for (auto _ : state) {
    benchmark::DoNotOptimize(zspa::dot(s.visual.row(0), s.visual.row(1)));
  }
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(2 * d * sizeof(float)));
}

static void PruneShapes(benchmark::internal::Benchmark* b) {
  // single 24x24 patch grid, and five of them
  for (int n : {576, 2880}) {
    for (int d : {1024, 4096}) b->Args({n, d});
  }
  b->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_ZspaPrune)->Apply(PruneShapes);
BENCHMARK(BM_DivPrune)->Apply(PruneShapes);
BENCHMARK(BM_RelevanceScores)->Apply(PruneShapes);
BENCHMARK(BM_GreedyExtend)
    ->Args({576, 4096, 16})
    ->Args({576, 4096, 50})
    ->Args({2880, 4096, 50})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Dot)->Arg(64)->Arg(1024)->Arg(4096);

BENCHMARK_MAIN();
