#include "zspa/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <string>

#include "zspa/error.hpp"
#include "zspa/rng.hpp"

namespace zspa {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

void require_visual(MatrixView visual) {
  if (visual.empty()) throw Error(ErrorCode::EmptyVisual, "visual matrix has 0 tokens");
}

void keep_everything(PruneResult& result, std::size_t n) {
  result.kept_indices.resize(n);
  std::iota(result.kept_indices.begin(), result.kept_indices.end(), std::size_t{0});
  result.provenance.assign(n, Provenance::core);
  result.split = {n, n, 0, result.config.ratio};
}

PruneResult run_hierarchical(MatrixView prompt, MatrixView visual, std::size_t budget,
                             const PruneConfig& echo) {
  const auto start = Clock::now();
  require_visual(visual);
  if (budget == 0) throw Error(ErrorCode::BudgetZero, "budget must be >= 1");

  PruneResult result;
  result.config = echo;
  result.token_count = visual.rows();

  auto stage = Clock::now();
  const PooledPrompt pooled = pool_prompt(prompt, echo.pooling);
  result.timings.pooling_ms = elapsed_ms(stage);

  stage = Clock::now();
  result.relevance_scores = relevance_scores(pooled, visual).scores;
  result.timings.scoring_ms = elapsed_ms(stage);

  const std::size_t n = visual.rows();
  if (budget >= n) {
    // Validate the ratio even though it cannot change the outcome.
    split_budget(n, echo.ratio);
    keep_everything(result, n);
    result.timings.total_ms = elapsed_ms(start);
    return result;
  }

  result.split = split_budget(budget, echo.ratio);

  stage = Clock::now();
  const auto core = top_k_select(result.relevance_scores, result.split.core_count);
  auto state = SelectionState::with_core(n, core);
  result.timings.core_ms = elapsed_ms(stage);

  stage = Clock::now();
  state = greedy_diversity_extend(visual, std::move(state), result.split.diversity_count);
  result.timings.diversity_ms = elapsed_ms(stage);

  result.kept_indices = std::move(state.selected);
  result.provenance = std::move(state.provenance);
  result.timings.total_ms = elapsed_ms(start);
  return result;
}

PruneResult run_divprune(MatrixView visual, std::size_t budget, const PruneConfig& echo) {
  const auto start = Clock::now();
  require_visual(visual);
  if (budget == 0) throw Error(ErrorCode::BudgetZero, "budget must be >= 1");

  PruneResult result;
  result.config = echo;
  result.token_count = visual.rows();
  const std::size_t n = visual.rows();
  if (budget >= n) {
    keep_everything(result, n);
    result.timings.total_ms = elapsed_ms(start);
    return result;
  }

  result.split = {budget, 0, budget, 0.0};
  auto stage = Clock::now();
  auto state = greedy_diversity_extend(visual, SelectionState::with_core(n, {}), budget);
  result.timings.diversity_ms = elapsed_ms(stage);

  result.kept_indices = std::move(state.selected);
  result.provenance = std::move(state.provenance);
  result.timings.total_ms = elapsed_ms(start);
  return result;
}

PruneResult run_random(MatrixView visual, std::size_t budget, const PruneConfig& echo) {
  const auto start = Clock::now();
  require_visual(visual);
  if (budget == 0) throw Error(ErrorCode::BudgetZero, "budget must be >= 1");

  PruneResult result;
  result.config = echo;
  result.token_count = visual.rows();
  const std::size_t n = visual.rows();
  if (budget >= n) {
    keep_everything(result, n);
    result.timings.total_ms = elapsed_ms(start);
    return result;
  }

  SplitMix64 rng(echo.rng_seed);
  result.kept_indices = sample_without_replacement(n, budget, rng);
  result.provenance.assign(budget, Provenance::sampled);
  result.split = {budget, 0, 0, 0.0};
  result.timings.total_ms = elapsed_ms(start);
  return result;
}

PruneConfig echo_for(Strategy strategy, std::size_t budget) {
  PruneConfig c;
  c.strategy = strategy;
  c.budget = budget;
  return c;
}

}  // namespace

std::string_view to_string(Strategy s) noexcept {
  switch (s) {
    case Strategy::zspa: return "zspa";
    case Strategy::divprune: return "divprune";
    case Strategy::relevance_only: return "relevance";
    case Strategy::random: return "random";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view text) {
  if (text == "zspa") return Strategy::zspa;
  if (text == "divprune") return Strategy::divprune;
  if (text == "relevance" || text == "relevance_only") return Strategy::relevance_only;
  if (text == "random") return Strategy::random;
  throw Error(ErrorCode::InvalidConfig, "unknown strategy '" + std::string(text) + "'");
}

std::size_t PruneResult::count(Provenance p) const noexcept {
  return static_cast<std::size_t>(std::count(provenance.begin(), provenance.end(), p));
}

std::size_t resolve_budget(const PruneConfig& config, std::size_t n) {
  if (config.prune_rate.has_value() == config.budget.has_value()) {
    throw Error(ErrorCode::InvalidConfig, "exactly one of prune_rate and budget must be set");
  }
  if (n == 0) throw Error(ErrorCode::EmptyVisual, "visual matrix has 0 tokens");
  if (config.budget) {
    if (*config.budget == 0) throw Error(ErrorCode::BudgetZero, "budget must be >= 1");
    return std::min(*config.budget, n);
  }
  return std::min(compute_budget(n, *config.prune_rate), n);
}

PruneResult zspa_prune(MatrixView prompt, MatrixView visual, const PruneConfig& config) {
  PruneConfig echo = config;
  echo.strategy = Strategy::zspa;
  return run_hierarchical(prompt, visual, resolve_budget(config, visual.rows()), echo);
}

PruneResult baseline_divprune(MatrixView visual, std::size_t budget) {
  auto echo = echo_for(Strategy::divprune, budget);
  echo.ratio = 0.0;
  return run_divprune(visual, budget, echo);
}

PruneResult baseline_relevance_only(MatrixView prompt, MatrixView visual, std::size_t budget,
                                    PoolingMode pooling) {
  auto echo = echo_for(Strategy::relevance_only, budget);
  echo.ratio = 1.0;
  echo.pooling = pooling;
  return run_hierarchical(prompt, visual, budget, echo);
}

PruneResult baseline_random(MatrixView visual, std::size_t budget, std::uint64_t seed) {
  auto echo = echo_for(Strategy::random, budget);
  echo.rng_seed = seed;
  return run_random(visual, budget, echo);
}

PruneResult prune(MatrixView prompt, MatrixView visual, const PruneConfig& config) {
  const std::size_t budget = resolve_budget(config, visual.rows());
  switch (config.strategy) {
    case Strategy::zspa: return run_hierarchical(prompt, visual, budget, config);
    case Strategy::relevance_only: {
      PruneConfig echo = config;
      echo.ratio = 1.0;
      return run_hierarchical(prompt, visual, budget, echo);
    }
    case Strategy::divprune: {
      PruneConfig echo = config;
      echo.ratio = 0.0;
      return run_divprune(visual, budget, echo);
    }
    case Strategy::random: return run_random(visual, budget, config);
  }
  throw Error(ErrorCode::InvalidConfig, "unknown strategy");
}

}  // namespace zspa
