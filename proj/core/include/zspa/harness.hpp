#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "zspa/embedding.hpp"
#include "zspa/pipeline.hpp"

namespace zspa {

// Synthetic planted-cluster instances standing in for real image/prompt
// pairs, plus the proxy metrics and the ratio sweep built on them.

struct ScenarioParams {
  std::size_t dim = 32;
  std::size_t tokens = 100;        // visual tokens n
  std::size_t clusters = 8;        // cluster 0 is the prompt-aligned one
  double relevant_fraction = 0.25;
  double noise_sigma = 0.3;        // per-coordinate std of isotropic noise
  std::size_t prompt_tokens = 8;   // m
};

/// Ground truth: relevant_mask[j] is true iff visual token j was drawn from
/// the prompt-aligned cluster.
struct Scenario {
  ScenarioParams params;
  std::uint64_t seed = 0;
  EmbeddingMatrix prompt;
  EmbeddingMatrix visual;
  EmbeddingMatrix centers;  // unit-norm cluster centers, row 0 is relevant
  std::vector<bool> relevant_mask;

  std::size_t relevant_count() const noexcept;
};

/// Cluster centers are uniform on the unit sphere; exactly
/// round(fraction * n) tokens (clamped to [1, n - 1]) come from cluster 0 and
/// the rest are dealt round-robin over the other clusters, then token
/// positions are shuffled. Every token is center + N(0, sigma^2 I), stored
/// unnormalized; prompt tokens are drawn around the relevant center the same
/// way. Throws DegenerateParams.
Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed);

struct Metrics {
  double relevance_coverage = 0.0;  // mean mean-pooled-prompt cosine over kept
  double dispersion = 0.0;          // min over kept pairs of (1 - cosine); 2 if < 2 kept
  double oracle_recall = 0.0;       // |kept & relevant| / min(|kept|, |relevant|)
  double runtime_ms = 0.0;
};

/// Scores against the scenario's mean-pooled prompt regardless of the
/// strategy's own pooling, so cells are comparable across strategies.
Metrics evaluate(const PruneResult& result, const Scenario& scenario);

struct ReportRow {
  Strategy strategy = Strategy::zspa;
  double rho = 0.0;
  double prune_rate = 0.0;
  Metrics mean;       // averaged over runs
  std::size_t runs = 0;
};

struct Report {
  std::vector<ReportRow> rows;
};

struct SweepConfig {
  ScenarioParams scenario;
  std::uint64_t first_seed = 0;
  std::size_t seed_count = 10;
  std::vector<Strategy> strategies{Strategy::zspa};
  std::vector<double> rhos = default_rho_grid();
  std::vector<double> prune_rates{0.9};
  PoolingMode pooling = PoolingMode::mean;

  /// 0.1, 0.2, ..., 0.9 computed as i / 10.
  static std::vector<double> default_rho_grid();
};

/// One row per (strategy, rho, prune_rate) in that nesting order, each
/// averaged over seeds first_seed .. first_seed + seed_count - 1. Strategies
/// that ignore rho still get a row per rho value.
Report sweep(const SweepConfig& config);

/// Fixed header: strategy,rho,prune_rate,relevance_coverage,dispersion,oracle_recall,runtime_ms
void write_report_csv(const Report& report, std::ostream& out);
std::string format_report_table(const Report& report);

inline constexpr const char* kReportCsvHeader =
    "strategy,rho,prune_rate,relevance_coverage,dispersion,oracle_recall,runtime_ms";

}  // namespace zspa
