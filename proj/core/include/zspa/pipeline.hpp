#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "zspa/embedding.hpp"
#include "zspa/selection.hpp"

namespace zspa {

enum class Strategy { zspa, divprune, relevance_only, random };

std::string_view to_string(Strategy s) noexcept;
/// Accepts "zspa", "divprune", "relevance" (or "relevance_only"), "random".
Strategy parse_strategy(std::string_view text);

/// Parameters for one pruning run. Exactly one of `prune_rate` and `budget`
/// must be set.
struct PruneConfig {
  Strategy strategy = Strategy::zspa;
  std::optional<double> prune_rate;
  std::optional<std::size_t> budget;
  double ratio = 0.5;  // core share of the budget; zspa only
  PoolingMode pooling = PoolingMode::mean;
  std::uint64_t rng_seed = 0;  // random only
};

/// Wall-clock milliseconds per stage. Never feeds back into selection.
struct StageTimings {
  double pooling_ms = 0.0;
  double scoring_ms = 0.0;
  double core_ms = 0.0;
  double diversity_ms = 0.0;
  double total_ms = 0.0;
};

/// Kept tokens in a fixed order: core tokens by descending relevance, then
/// diversity tokens in pick order. Truncating the list keeps a valid
/// (smaller) selection.
struct PruneResult {
  std::vector<std::size_t> kept_indices;
  std::vector<Provenance> provenance;
  std::vector<double> relevance_scores;  // length n; empty when not computed
  PruneConfig config;
  BudgetSplit split;
  std::size_t token_count = 0;
  StageTimings timings;

  std::size_t count(Provenance p) const noexcept;
};

/// Budget implied by `config` for n visual tokens, clamped to n. Throws
/// InvalidConfig unless exactly one of prune_rate/budget is set, plus the
/// compute_budget / BudgetZero errors.
std::size_t resolve_budget(const PruneConfig& config, std::size_t n);

/// Pool the prompt, score every visual token, keep the top-k core tokens and
/// extend greedily with k~ minimum-redundancy tokens. A budget >= n keeps
/// every token (provenance core) without running selection.
PruneResult zspa_prune(MatrixView prompt, MatrixView visual, const PruneConfig& config);

/// Pure diversity: empty core, centroid seed, `budget` greedy picks.
PruneResult baseline_divprune(MatrixView visual, std::size_t budget);

/// Top-`budget` by relevance; identical to zspa_prune with ratio 1.
PruneResult baseline_relevance_only(MatrixView prompt, MatrixView visual, std::size_t budget,
                                    PoolingMode pooling);

/// Uniform sample without replacement driven by SplitMix64(seed).
PruneResult baseline_random(MatrixView visual, std::size_t budget, std::uint64_t seed);

/// Dispatches on config.strategy. `prompt` may be empty for divprune/random.
PruneResult prune(MatrixView prompt, MatrixView visual, const PruneConfig& config);

}  // namespace zspa
