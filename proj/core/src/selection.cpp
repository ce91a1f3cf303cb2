#include "zspa/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zspa/error.hpp"

namespace zspa {

namespace {

std::vector<double> row_squared_norms(MatrixView m) {
  std::vector<double> out(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = squared_norm(m.row(i));
  return out;
}

// Position in `pool` of the smallest value; the pool is ascending so the
// first strict minimum is also the lowest token index among ties.
std::size_t argmin_position(const std::vector<double>& values) {
  std::size_t best = 0;
  for (std::size_t p = 1; p < values.size(); ++p) {
    if (values[p] < values[best]) best = p;
  }
  return best;
}

}  // namespace

std::string_view to_string(Provenance p) noexcept {
  switch (p) {
    case Provenance::core: return "core";
    case Provenance::diversity: return "diversity";
    case Provenance::sampled: return "sampled";
  }
  return "unknown";
}

SelectionState SelectionState::with_core(std::size_t n, std::span<const std::size_t> core) {
  SelectionState state;
  std::vector<bool> taken(n, false);
  for (std::size_t idx : core) {
    if (idx >= n) {
      throw Error(ErrorCode::KOutOfRange,
                  "core index " + std::to_string(idx) + " >= " + std::to_string(n));
    }
    if (taken[idx]) throw Error(ErrorCode::InvalidConfig, "duplicate core index " + std::to_string(idx));
    taken[idx] = true;
    state.selected.push_back(idx);
    state.provenance.push_back(Provenance::core);
  }
  state.pool.reserve(n - core.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (!taken[j]) state.pool.push_back(j);
  }
  return state;
}

void SelectionState::check(std::size_t n) const {
  if (provenance.size() != selected.size()) {
    throw Error(ErrorCode::InvalidConfig, "provenance length differs from selection length");
  }
  std::vector<bool> seen(n, false);
  for (std::size_t idx : selected) {
    if (idx >= n) throw Error(ErrorCode::InvalidConfig, "selected index out of range");
    if (seen[idx]) throw Error(ErrorCode::InvalidConfig, "duplicate selected index");
    seen[idx] = true;
  }
  for (std::size_t p = 0; p < pool.size(); ++p) {
    if (pool[p] >= n) throw Error(ErrorCode::InvalidConfig, "pool index out of range");
    if (seen[pool[p]]) throw Error(ErrorCode::InvalidConfig, "pool and selection overlap");
    if (p > 0 && pool[p - 1] >= pool[p]) {
      throw Error(ErrorCode::InvalidConfig, "pool is not strictly ascending");
    }
  }
}

RelevanceScores relevance_scores(const PooledPrompt& prompt, MatrixView visual) {
  if (visual.empty()) throw Error(ErrorCode::EmptyVisual, "visual matrix has 0 tokens");
  if (prompt.tokens.empty()) throw Error(ErrorCode::EmptyPrompt, "prompt has 0 tokens");
  if (prompt.tokens.cols() != visual.cols()) {
    throw Error(ErrorCode::DimensionMismatch,
                "prompt dimension " + std::to_string(prompt.tokens.cols()) +
                    " != visual dimension " + std::to_string(visual.cols()));
  }

  const auto prompt_norms = row_squared_norms(prompt.tokens);
  // mean/max carry one row, so the max over rows is just the single cosine.
  const std::size_t prompt_rows = prompt.mode == PoolingMode::none ? prompt.tokens.rows() : 1;

  RelevanceScores out;
  out.scores.resize(visual.rows());
  for (std::size_t j = 0; j < visual.rows(); ++j) {
    const auto v = visual.row(j);
    const double v_norm = squared_norm(v);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < prompt_rows; ++i) {
      best = std::max(best, cosine_from_parts(dot(prompt.tokens.row(i), v), prompt_norms[i], v_norm));
    }
    out.scores[j] = best;
  }
  return out;
}

std::vector<std::size_t> top_k_select(std::span<const double> scores, std::size_t k) {
  if (k > scores.size()) {
    throw Error(ErrorCode::KOutOfRange,
                "k = " + std::to_string(k) + " exceeds token count " + std::to_string(scores.size()));
  }
  std::vector<std::size_t> order(scores.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
  const auto by_score = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    by_score);
  order.resize(k);
  return order;
}

SelectionState greedy_diversity_extend(MatrixView visual, SelectionState state, std::size_t steps) {
  if (steps > state.pool.size()) {
    throw Error(ErrorCode::PoolExhausted, "requested " + std::to_string(steps) +
                                              " diversity picks from a pool of " +
                                              std::to_string(state.pool.size()));
  }
  if (steps == 0) return state;

  const auto norms = row_squared_norms(visual);
  auto& pool = state.pool;

  auto take = [&](std::size_t position) {
    const std::size_t idx = pool[position];
    state.selected.push_back(idx);
    state.provenance.push_back(Provenance::diversity);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(position));
    return idx;
  };

  // redundancy[p] = max cosine of pool[p] to every selected token so far.
  std::vector<double> redundancy;

  if (state.selected.empty()) {
    const auto centroid = mean_pool(visual);
    const auto c = centroid.vector();
    const double c_norm = squared_norm(c);
    std::vector<double> to_centroid(pool.size());
    for (std::size_t p = 0; p < pool.size(); ++p) {
      to_centroid[p] = cosine_from_parts(dot(c, visual.row(pool[p])), c_norm, norms[pool[p]]);
    }
    take(argmin_position(to_centroid));
    --steps;
    if (steps == 0) return state;
  }

  redundancy.assign(pool.size(), -std::numeric_limits<double>::infinity());
  for (std::size_t p = 0; p < pool.size(); ++p) {
    const auto x = visual.row(pool[p]);
    for (std::size_t y : state.selected) {
      redundancy[p] = std::max(redundancy[p], cosine_from_parts(dot(x, visual.row(y)),
                                                                norms[pool[p]], norms[y]));
    }
  }

  for (std::size_t step = 0; step < steps; ++step) {
    const std::size_t position = argmin_position(redundancy);
    const std::size_t picked = take(position);
    redundancy.erase(redundancy.begin() + static_cast<std::ptrdiff_t>(position));

    const auto v = visual.row(picked);
    for (std::size_t p = 0; p < pool.size(); ++p) {
      redundancy[p] = std::max(redundancy[p], cosine_from_parts(dot(visual.row(pool[p]), v),
                                                                norms[pool[p]], norms[picked]));
    }
  }
  return state;
}

BudgetSplit split_budget(std::size_t budget, double ratio) {
  if (budget == 0) throw Error(ErrorCode::BudgetZero, "budget must be >= 1");
  if (!(ratio >= 0.0 && ratio <= 1.0)) {
    throw Error(ErrorCode::RatioOutOfRange, "ratio " + std::to_string(ratio) + " not in [0, 1]");
  }
  const double raw = std::round(ratio * static_cast<double>(budget));
  const auto core = std::min(budget, static_cast<std::size_t>(std::max(0.0, raw)));
  return {budget, core, budget - core, ratio};
}

std::size_t compute_budget(std::size_t n, double prune_rate) {
  if (!(prune_rate >= 0.0 && prune_rate < 1.0)) {
    throw Error(ErrorCode::RateOutOfRange,
                "prune rate " + std::to_string(prune_rate) + " not in [0, 1)");
  }
  if (n == 0) throw Error(ErrorCode::EmptyVisual, "cannot budget 0 tokens");
  const double kept = std::round(static_cast<double>(n) * (1.0 - prune_rate));
  return std::max<std::size_t>(1, static_cast<std::size_t>(kept));
}

}  // namespace zspa
