#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "zspa/error.hpp"
#include "zspa/pipeline.hpp"

using namespace zspa;
using Indices = std::vector<std::size_t>;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected zspa::Error";
  return ErrorCode::IoError;
}

PruneConfig with_budget(std::size_t budget, double ratio, PoolingMode pooling = PoolingMode::mean) {
  PruneConfig c;
  c.budget = budget;
  c.ratio = ratio;
  c.pooling = pooling;
  return c;
}

void expect_well_formed(const PruneResult& r, std::size_t n, std::size_t budget) {
  ASSERT_EQ(r.kept_indices.size(), budget);
  ASSERT_EQ(r.provenance.size(), budget);
  std::set<std::size_t> unique(r.kept_indices.begin(), r.kept_indices.end());
  EXPECT_EQ(unique.size(), budget);
  for (auto i : r.kept_indices) EXPECT_LT(i, n);
}

}  // namespace

TEST(ZspaPrune, HandInstance) {
  auto prompt = EmbeddingMatrix::from_rows({{1, 0}});
  auto visual = EmbeddingMatrix::from_rows({{1, 0}, {0.9f, 0.1f}, {0, 1}, {-1, 0}});
  auto r = zspa_prune(prompt, visual, with_budget(2, 0.5));
  // Core: index 0 (cosine 1). Redundancy to it: idx1 ~0.994, idx2 0, idx3 -1,
  // so the minimum-redundancy pick is the antipodal token 3.
  EXPECT_EQ(r.kept_indices, (Indices{0, 3}));
  EXPECT_EQ(r.provenance, (std::vector<Provenance>{Provenance::core, Provenance::diversity}));
  EXPECT_EQ(r.split.core_count, 1u);
  EXPECT_EQ(r.split.diversity_count, 1u);
  EXPECT_EQ(r.relevance_scores.size(), 4u);
}

TEST(ZspaPrune, HandInstanceWithoutAntipode) {
  auto prompt = EmbeddingMatrix::from_rows({{1, 0}});
  auto visual = EmbeddingMatrix::from_rows({{1, 0}, {0.9f, 0.1f}, {0, 1}});
  auto r = zspa_prune(prompt, visual, with_budget(2, 0.5));
  EXPECT_EQ(r.kept_indices, (Indices{0, 2}));
}

TEST(ZspaPrune, RatioOneIsTopK) {
  std::mt19937_64 gen(4);
  auto prompt = oracle::random_matrix(5, 8, gen);
  auto visual = oracle::random_matrix(40, 8, gen);
  auto r = zspa_prune(prompt, visual, with_budget(12, 1.0));
  EXPECT_EQ(r.kept_indices, top_k_select(r.relevance_scores, 12));
  EXPECT_EQ(r.count(Provenance::diversity), 0u);
}

TEST(ZspaPrune, RatioZeroIsDivPrune) {
  std::mt19937_64 gen(5);
  auto prompt = oracle::random_matrix(5, 8, gen);
  auto visual = oracle::random_matrix(40, 8, gen);
  auto r = zspa_prune(prompt, visual, with_budget(12, 0.0));
  EXPECT_EQ(r.kept_indices, baseline_divprune(visual, 12).kept_indices);
  EXPECT_EQ(r.count(Provenance::core), 0u);
}

TEST(ZspaPrune, CoreIsTopKForEveryRatio) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 3 + gen() % 60;
    auto prompt = oracle::random_matrix(1 + gen() % 4, 6, gen);
    auto visual = oracle::random_matrix(n, 6, gen);
    const std::size_t budget = 1 + gen() % (n - 1);
    const double ratio = static_cast<double>(gen() % 11) / 10.0;
    auto r = zspa_prune(prompt, visual, with_budget(budget, ratio));
    expect_well_formed(r, n, budget);
    const auto split = split_budget(budget, ratio);
    EXPECT_EQ(r.count(Provenance::core), split.core_count);
    EXPECT_EQ(r.count(Provenance::diversity), split.diversity_count);
    const Indices core(r.kept_indices.begin(),
                       r.kept_indices.begin() + static_cast<std::ptrdiff_t>(split.core_count));
    EXPECT_EQ(core, top_k_select(r.relevance_scores, split.core_count));
  }
}

TEST(ZspaPrune, BudgetAtLeastNKeepsEverything) {
  auto prompt = EmbeddingMatrix::from_rows({{1, 0}});
  auto visual = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}, {-1, 0}});
  for (std::size_t budget : {3u, 10u}) {
    auto r = zspa_prune(prompt, visual, with_budget(budget, 0.3));
    EXPECT_EQ(r.kept_indices, (Indices{0, 1, 2}));
    EXPECT_EQ(r.count(Provenance::core), 3u);
  }
}

TEST(ZspaPrune, BudgetFromPruneRate) {
  std::mt19937_64 gen(8);
  auto prompt = oracle::random_matrix(4, 16, gen);
  auto visual = oracle::random_matrix(576, 16, gen);
  PruneConfig c;
  c.prune_rate = 0.9;
  c.ratio = 0.4;
  auto r = zspa_prune(prompt, visual, c);
  expect_well_formed(r, 576, 58);
  EXPECT_EQ(r.count(Provenance::core), 23u);
  EXPECT_EQ(r.count(Provenance::diversity), 35u);
}

TEST(ZspaPrune, ConfigErrors) {
  auto prompt = EmbeddingMatrix::from_rows({{1, 0}});
  auto visual = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}});
  PruneConfig none;
  EXPECT_EQ(code_of([&] { zspa_prune(prompt, visual, none); }), ErrorCode::InvalidConfig);
  PruneConfig both = with_budget(1, 0.5);
  both.prune_rate = 0.5;
  EXPECT_EQ(code_of([&] { zspa_prune(prompt, visual, both); }), ErrorCode::InvalidConfig);
  EXPECT_EQ(code_of([&] { zspa_prune(prompt, visual, with_budget(0, 0.5)); }),
            ErrorCode::BudgetZero);
  EXPECT_EQ(code_of([&] { zspa_prune(prompt, visual, with_budget(1, 1.5)); }),
            ErrorCode::RatioOutOfRange);
  EXPECT_EQ(code_of([&] { zspa_prune(prompt, EmbeddingMatrix(0, 2, {}), with_budget(1, 0.5)); }),
            ErrorCode::EmptyVisual);
  EXPECT_EQ(code_of([&] { zspa_prune(EmbeddingMatrix(0, 2, {}), visual, with_budget(1, 0.5)); }),
            ErrorCode::EmptyPrompt);
  auto wide = EmbeddingMatrix::from_rows({{1, 0, 0}});
  EXPECT_EQ(code_of([&] { zspa_prune(wide, visual, with_budget(1, 0.5)); }),
            ErrorCode::DimensionMismatch);
}

TEST(ZspaPrune, ZeroCopyViewMatchesOwnedMatrix) {
  std::mt19937_64 gen(12);
  auto prompt = oracle::random_matrix(3, 10, gen);
  auto visual = oracle::random_matrix(50, 10, gen);
  const std::vector<float> raw(visual.data().begin(), visual.data().end());
  const MatrixView view(raw, 50, 10);
  auto a = zspa_prune(prompt, visual, with_budget(9, 0.4));
  auto b = zspa_prune(prompt, view, with_budget(9, 0.4));
  EXPECT_EQ(a.kept_indices, b.kept_indices);
  EXPECT_EQ(a.relevance_scores, b.relevance_scores);
}

// A copy of a core token placed in the pool is exactly as redundant as
// possible, so it never pushes out a real diversity pick.
TEST(ZspaPrune, DuplicateOfCoreNeverDisplacesDiversityPick) {
  std::mt19937_64 gen(13);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 10 + gen() % 40;
    auto prompt = oracle::random_matrix(3, 6, gen);
    auto visual = oracle::random_matrix(n, 6, gen);
    const std::size_t budget = 2 + gen() % (n / 2);
    auto base = zspa_prune(prompt, visual, with_budget(budget, 0.5));
    const std::size_t k = base.split.core_count;
    ASSERT_GE(k, 1u);
    const Indices core(base.kept_indices.begin(),
                       base.kept_indices.begin() + static_cast<std::ptrdiff_t>(k));
    const std::size_t copied = core[gen() % k];

    std::vector<float> data(visual.data().begin(), visual.data().end());
    data.insert(data.end(), visual.row(copied).begin(), visual.row(copied).end());
    EmbeddingMatrix augmented(n + 1, 6, std::move(data));
    auto state = greedy_diversity_extend(augmented, SelectionState::with_core(n + 1, core),
                                         base.split.diversity_count);
    EXPECT_EQ(state.selected, base.kept_indices) << "trial " << trial;
    EXPECT_EQ(state.pool.back(), n);
  }
}

TEST(ZspaPrune, PermutationEquivariance) {
  std::mt19937_64 gen(14);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 5 + gen() % 30;
    auto prompt = oracle::random_matrix(2, 5, gen);
    auto visual = oracle::random_matrix(n, 5, gen);
    auto scores = relevance_scores(mean_pool(prompt), visual);
    if (!oracle::all_distinct(visual, scores.scores)) continue;
    ++checked;
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), gen);
    auto shuffled = oracle::permuted_rows(visual, perm);
    const std::size_t budget = 1 + gen() % (n - 1);
    auto a = zspa_prune(prompt, visual, with_budget(budget, 0.5));
    auto b = zspa_prune(prompt, shuffled, with_budget(budget, 0.5));
    Indices mapped;
    for (auto i : b.kept_indices) mapped.push_back(perm[i]);
    EXPECT_EQ(mapped, a.kept_indices);
  }
  EXPECT_GT(checked, 40);
}

TEST(DivPrune, Examples) {
  auto visual = EmbeddingMatrix::from_rows({{1, 0}, {0, 1}, {1, 1}, {-1, -1}});
  auto one = baseline_divprune(visual, 1);
  EXPECT_EQ(one.kept_indices, (Indices{3}));
  EXPECT_EQ(one.provenance, (std::vector<Provenance>{Provenance::diversity}));
  EXPECT_TRUE(one.relevance_scores.empty());
  auto all = baseline_divprune(visual, 4);
  EXPECT_EQ(all.kept_indices, (Indices{0, 1, 2, 3}));
}

TEST(DivPrune, ClusteredTokensMatchNaiveOracle) {
  // three tight 2-D clusters
  auto visual = EmbeddingMatrix::from_rows({{1.0f, 0.1f},
                                            {1.0f, 0.15f},
                                            {0.95f, 0.05f},
                                            {0.1f, 1.0f},
                                            {0.05f, 0.9f},
                                            {-1.0f, 0.2f},
                                            {-0.9f, 0.25f},
                                            {-1.1f, 0.1f}});
  auto r = baseline_divprune(visual, 3);
  EXPECT_EQ(r.kept_indices, oracle::naive_greedy(visual, {}, 3));
  std::set<int> clusters;
  for (auto i : r.kept_indices) clusters.insert(i < 3 ? 0 : (i < 5 ? 1 : 2));
  EXPECT_EQ(clusters.size(), 3u);
}

TEST(RelevanceOnly, EqualsZspaWithRatioOne) {
  std::mt19937_64 gen(15);
  for (auto pooling : {PoolingMode::mean, PoolingMode::max, PoolingMode::none}) {
    auto prompt = oracle::random_matrix(4, 8, gen);
    auto visual = oracle::random_matrix(30, 8, gen);
    auto a = baseline_relevance_only(prompt, visual, 7, pooling);
    auto b = zspa_prune(prompt, visual, with_budget(7, 1.0, pooling));
    EXPECT_EQ(a.kept_indices, b.kept_indices);
    EXPECT_EQ(a.config.strategy, Strategy::relevance_only);
  }
}

TEST(RelevanceOnly, HandInstance) {
  // mean prompt (1, 1); cosines 0.7071, 1, 0.7071, 0.3162
  auto prompt = EmbeddingMatrix::from_rows({{1, 1}});
  auto visual = EmbeddingMatrix::from_rows({{1, 0}, {1, 1}, {0, 1}, {-1, 2}});
  auto r = baseline_relevance_only(prompt, visual, 2, PoolingMode::mean);
  EXPECT_EQ(r.kept_indices, (Indices{1, 0}));
  EXPECT_NEAR(r.relevance_scores[3], 1.0 / std::sqrt(10.0), 1e-15);
}

TEST(RelevanceOnly, OrthogonalDecoysScoreZero) {
  auto prompt = EmbeddingMatrix::from_rows({{0, 1, 0}});
  auto visual = EmbeddingMatrix::from_rows({{1, 0, 0}, {0, 2, 0}, {0, 0, 3}, {0, 1, 1}});
  auto r = baseline_relevance_only(prompt, visual, 2, PoolingMode::mean);
  EXPECT_EQ(r.relevance_scores[0], 0.0);
  EXPECT_EQ(r.relevance_scores[2], 0.0);
  EXPECT_EQ(r.kept_indices, (Indices{1, 3}));
}

TEST(RandomBaseline, DeterministicAndGolden) {
  EmbeddingMatrix visual(10, 2);
  auto a = baseline_random(visual, 3, 7);
  auto b = baseline_random(visual, 3, 7);
  EXPECT_EQ(a.kept_indices, b.kept_indices);
  // SplitMix64(7), Lemire bounded draws, partial Fisher-Yates
  EXPECT_EQ(a.kept_indices, (Indices{3, 1, 9}));
  EXPECT_EQ(a.count(Provenance::sampled), 3u);
  EXPECT_EQ(baseline_random(visual, 10, 7).kept_indices,
            (Indices{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}));
  EXPECT_NE(baseline_random(visual, 3, 8).kept_indices, a.kept_indices);
}

TEST(Dispatch, EveryStrategyHonoursBudget) {
  std::mt19937_64 gen(16);
  auto prompt = oracle::random_matrix(4, 8, gen);
  auto visual = oracle::random_matrix(64, 8, gen);
  for (auto s : {Strategy::zspa, Strategy::divprune, Strategy::relevance_only, Strategy::random}) {
    PruneConfig c;
    c.strategy = s;
    c.prune_rate = 0.75;
    c.ratio = 0.5;
    c.rng_seed = 99;
    auto r = prune(prompt, visual, c);
    expect_well_formed(r, 64, 16);
    EXPECT_EQ(r.config.strategy, s);
    EXPECT_EQ(parse_strategy(to_string(s)), s);
  }
  EXPECT_EQ(code_of([] { parse_strategy("fastv"); }), ErrorCode::InvalidConfig);
}

TEST(Dispatch, MatchesDirectEntryPoints) {
  std::mt19937_64 gen(17);
  auto prompt = oracle::random_matrix(4, 8, gen);
  auto visual = oracle::random_matrix(50, 8, gen);
  PruneConfig c = with_budget(10, 0.3);
  EXPECT_EQ(prune(prompt, visual, c).kept_indices, zspa_prune(prompt, visual, c).kept_indices);
  c.strategy = Strategy::divprune;
  EXPECT_EQ(prune(prompt, visual, c).kept_indices, baseline_divprune(visual, 10).kept_indices);
  c.strategy = Strategy::random;
  c.rng_seed = 5;
  EXPECT_EQ(prune(EmbeddingMatrix(0, 8, {}), visual, c).kept_indices,
            baseline_random(visual, 10, 5).kept_indices);
}
