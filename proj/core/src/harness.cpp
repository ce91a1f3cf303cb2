#include "zspa/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "zspa/error.hpp"
#include "zspa/rng.hpp"
#include "zspa/selection.hpp"

namespace zspa {

namespace {

void check_params(const ScenarioParams& p) {
  const auto fail = [](const std::string& what) { throw Error(ErrorCode::DegenerateParams, what); };
  if (p.tokens < 2) fail("need at least 2 visual tokens");
  if (p.dim < 2) fail("need embedding dimension >= 2");
  if (p.clusters < 2) fail("need at least 2 clusters (one relevant, one not)");
  if (p.prompt_tokens < 1) fail("need at least 1 prompt token");
  if (!(p.relevant_fraction > 0.0 && p.relevant_fraction < 1.0)) {
    fail("relevant fraction must lie in (0, 1)");
  }
  if (!(p.noise_sigma >= 0.0) || !std::isfinite(p.noise_sigma)) fail("noise sigma must be >= 0");
}

std::vector<float> unit_gaussian_direction(std::size_t dim, SplitMix64& rng) {
  std::vector<double> g(dim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& x : g) {
      x = rng.normal();
      norm2 += x * x;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  std::vector<float> out(dim);
  for (std::size_t i = 0; i < dim; ++i) out[i] = static_cast<float>(g[i] * inv);
  return out;
}

void draw_around(std::span<const float> center, double sigma, SplitMix64& rng,
                 std::span<float> out) {
  for (std::size_t i = 0; i < center.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(center[i]) + sigma * rng.normal());
  }
}

}  // namespace

std::size_t Scenario::relevant_count() const noexcept {
  return static_cast<std::size_t>(std::count(relevant_mask.begin(), relevant_mask.end(), true));
}

Scenario generate_scenario(const ScenarioParams& params, std::uint64_t seed) {
  check_params(params);
  SplitMix64 rng(seed);
  const std::size_t n = params.tokens;
  const std::size_t d = params.dim;

  Scenario s;
  s.params = params;
  s.seed = seed;

  s.centers = EmbeddingMatrix(params.clusters, d);
  for (std::size_t c = 0; c < params.clusters; ++c) {
    const auto dir = unit_gaussian_direction(d, rng);
    std::copy(dir.begin(), dir.end(), s.centers.mutable_row(c).begin());
  }

  const auto planted = static_cast<std::size_t>(
      std::round(params.relevant_fraction * static_cast<double>(n)));
  const std::size_t relevant = std::clamp<std::size_t>(planted, 1, n - 1);

  std::vector<std::size_t> label(n);
  for (std::size_t j = 0; j < n; ++j) {
    label[j] = j < relevant ? 0 : 1 + (j - relevant) % (params.clusters - 1);
  }
  for (std::size_t i = n - 1; i > 0; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_below(i + 1));
    std::swap(label[i], label[j]);
  }

  s.visual = EmbeddingMatrix(n, d);
  s.relevant_mask.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    draw_around(s.centers.row(label[j]), params.noise_sigma, rng, s.visual.mutable_row(j));
    s.relevant_mask[j] = label[j] == 0;
  }

  s.prompt = EmbeddingMatrix(params.prompt_tokens, d);
  for (std::size_t i = 0; i < params.prompt_tokens; ++i) {
    draw_around(s.centers.row(0), params.noise_sigma, rng, s.prompt.mutable_row(i));
  }
  return s;
}

Metrics evaluate(const PruneResult& result, const Scenario& scenario) {
  const MatrixView visual = scenario.visual;
  const auto& kept = result.kept_indices;
  for (std::size_t idx : kept) {
    if (idx >= visual.rows()) {
      throw Error(ErrorCode::DimensionMismatch, "kept index " + std::to_string(idx) +
                                                    " outside scenario with " +
                                                    std::to_string(visual.rows()) + " tokens");
    }
  }

  Metrics m;
  m.runtime_ms = result.timings.total_ms;
  if (kept.empty()) return m;

  const auto scores = relevance_scores(mean_pool(scenario.prompt), visual);
  double total = 0.0;
  for (std::size_t idx : kept) total += scores[idx];
  m.relevance_coverage = total / static_cast<double>(kept.size());

  m.dispersion = 2.0;
  std::vector<double> norms(kept.size());
  for (std::size_t a = 0; a < kept.size(); ++a) norms[a] = squared_norm(visual.row(kept[a]));
  for (std::size_t a = 0; a < kept.size(); ++a) {
    for (std::size_t b = a + 1; b < kept.size(); ++b) {
      const double c =
          cosine_from_parts(dot(visual.row(kept[a]), visual.row(kept[b])), norms[a], norms[b]);
      m.dispersion = std::min(m.dispersion, 1.0 - c);
    }
  }

  std::size_t hits = 0;
  for (std::size_t idx : kept) hits += scenario.relevant_mask[idx] ? 1 : 0;
  const std::size_t denom = std::min(kept.size(), scenario.relevant_count());
  m.oracle_recall = denom == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(denom);
  return m;
}

std::vector<double> SweepConfig::default_rho_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 9; ++i) grid.push_back(i / 10.0);
  return grid;
}

Report sweep(const SweepConfig& config) {
  Report report;
  for (Strategy strategy : config.strategies) {
    for (double rho : config.rhos) {
      for (double rate : config.prune_rates) {
        report.rows.push_back({strategy, rho, rate, {}, 0});
      }
    }
  }

  for (std::size_t s = 0; s < config.seed_count; ++s) {
    const std::uint64_t seed = config.first_seed + s;
    const Scenario scenario = generate_scenario(config.scenario, seed);
    for (auto& row : report.rows) {
      PruneConfig pc;
      pc.strategy = row.strategy;
      pc.prune_rate = row.prune_rate;
      pc.ratio = row.rho;
      pc.pooling = config.pooling;
      pc.rng_seed = seed;
      const Metrics m = evaluate(prune(scenario.prompt, scenario.visual, pc), scenario);
      row.mean.relevance_coverage += m.relevance_coverage;
      row.mean.dispersion += m.dispersion;
      row.mean.oracle_recall += m.oracle_recall;
      row.mean.runtime_ms += m.runtime_ms;
      ++row.runs;
    }
  }

  for (auto& row : report.rows) {
    if (row.runs == 0) continue;
    const auto runs = static_cast<double>(row.runs);
    row.mean.relevance_coverage /= runs;
    row.mean.dispersion /= runs;
    row.mean.oracle_recall /= runs;
    row.mean.runtime_ms /= runs;
  }
  return report;
}

void write_report_csv(const Report& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  for (const auto& row : report.rows) {
    out << fmt::format("{},{},{},{:.9g},{:.9g},{:.9g},{:.6f}\n", to_string(row.strategy), row.rho,
                       row.prune_rate, row.mean.relevance_coverage, row.mean.dispersion,
                       row.mean.oracle_recall, row.mean.runtime_ms);
  }
}

std::string format_report_table(const Report& report) {
  std::string out = fmt::format("{:<10} {:>5} {:>6} {:>10} {:>10} {:>8} {:>10}\n", "strategy",
                                "rho", "rate", "coverage", "dispersion", "recall", "ms");
  out += std::string(65, '-') + "\n";
  for (const auto& row : report.rows) {
    out += fmt::format("{:<10} {:>5.2f} {:>6.2f} {:>10.4f} {:>10.4f} {:>8.4f} {:>10.4f}\n",
                       to_string(row.strategy), row.rho, row.prune_rate,
                       row.mean.relevance_coverage, row.mean.dispersion, row.mean.oracle_recall,
                       row.mean.runtime_ms);
  }
  return out;
}

}  // namespace zspa
