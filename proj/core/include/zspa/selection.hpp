#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "zspa/embedding.hpp"

namespace zspa {

/// One cosine relevance score per visual token, each in [-1, 1].
struct RelevanceScores {
  std::vector<double> scores;

  std::size_t size() const noexcept { return scores.size(); }
  double operator[](std::size_t j) const noexcept { return scores[j]; }
};

/// How a kept token entered the selection.
enum class Provenance : std::uint8_t {
  core,       // top-k by prompt relevance
  diversity,  // greedy minimum-redundancy pick
  sampled,    // uniform random control baseline
};

std::string_view to_string(Provenance p) noexcept;

/// Ordered selection plus the remaining candidate pool.
///
/// Invariants: `selected` and `pool` are disjoint, hold indices < n, and
/// `selected` has no duplicates. `provenance[i]` describes `selected[i]`.
/// `pool` is kept in ascending index order.
struct SelectionState {
  std::vector<std::size_t> selected;
  std::vector<Provenance> provenance;
  std::vector<std::size_t> pool;

  /// `core` becomes the selected prefix; every other index in [0, n) is pooled.
  static SelectionState with_core(std::size_t n, std::span<const std::size_t> core);

  /// Throws InvalidConfig describing the first violated invariant.
  void check(std::size_t n) const;
};

/// Total budget l split into k core tokens and k~ diversity tokens.
struct BudgetSplit {
  std::size_t budget = 0;
  std::size_t core_count = 0;
  std::size_t diversity_count = 0;
  double ratio = 0.0;
};

/// s_j = cosine(pooled vector, v_j) for mean/max pooling; for `none`,
/// s_j = max over prompt rows t_i of cosine(t_i, v_j).
/// Throws DimensionMismatch, EmptyVisual.
RelevanceScores relevance_scores(const PooledPrompt& prompt, MatrixView visual);

/// Indices of the k largest scores, by descending score then ascending index.
/// Throws KOutOfRange if k > scores.size().
std::vector<std::size_t> top_k_select(std::span<const double> scores, std::size_t k);

/// Runs `steps` greedy max-min iterations: each moves the pool candidate with
/// the smallest redundancy (max cosine to anything selected; ties go to the
/// lowest index) into `selected` with diversity provenance.
///
/// With an empty selection the first pick is the token least similar to the
/// centroid of all visual tokens. Each candidate's running redundancy is
/// cached, so a run costs O((|selected| + steps) * n * d).
///
/// Throws PoolExhausted if steps > |pool|.
SelectionState greedy_diversity_extend(MatrixView visual, SelectionState state, std::size_t steps);

/// k = round-half-away(ratio * budget) clamped to [0, budget], k~ = budget - k.
/// Throws BudgetZero, RatioOutOfRange.
BudgetSplit split_budget(std::size_t budget, double ratio);

/// max(1, round-half-away(n * (1 - prune_rate))). Throws RateOutOfRange for
/// rates outside [0, 1), EmptyVisual for n == 0.
std::size_t compute_budget(std::size_t n, double prune_rate);

}  // namespace zspa
