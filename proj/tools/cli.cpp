#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#if __has_include("CLI11.hpp")
#include "CLI11.hpp"
#else
#include <CLI/CLI.hpp>
#endif
#include "zspa/zspa.hpp"

namespace zspa::cli {

namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

// Raised for flag combinations CLI11 cannot express; maps to exit 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PruneArgs {
  std::string visual;
  std::string prompt;
  std::string strategy = "zspa";
  double prune_rate = 0.0;
  std::size_t budget = 0;
  double ratio = 0.5;
  std::string pooling = "mean";
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "json";
  bool timings = false;
  CLI::Option* prune_rate_opt = nullptr;
  CLI::Option* budget_opt = nullptr;
};

struct ScenarioArgs {
  ScenarioParams params;
  std::uint64_t seed = 0;
};

struct GenArgs {
  ScenarioArgs scenario;
  std::string out_dir;
};

struct SweepArgs {
  ScenarioArgs scenario;
  std::size_t seeds = 100;
  std::vector<std::string> strategies{"zspa", "divprune", "relevance", "random"};
  std::vector<double> rhos = SweepConfig::default_rho_grid();
  std::vector<double> prune_rates{0.9};
  std::string pooling = "mean";
  std::string out;
};

void add_scenario_flags(CLI::App* app, ScenarioArgs& a) {
  app->add_option("--tokens", a.params.tokens, "Visual tokens per scenario")->capture_default_str();
  app->add_option("--dim", a.params.dim, "Embedding dimension")->capture_default_str();
  app->add_option("--clusters", a.params.clusters, "Cluster count (cluster 0 is relevant)")
      ->capture_default_str();
  app->add_option("--relevant-fraction", a.params.relevant_fraction,
                  "Share of tokens planted in the relevant cluster")
      ->capture_default_str();
  app->add_option("--sigma", a.params.noise_sigma, "Per-coordinate Gaussian noise std")
      ->capture_default_str();
  app->add_option("--prompt-tokens", a.params.prompt_tokens, "Prompt tokens per scenario")
      ->capture_default_str();
}

std::string provenance_name(Provenance p) { return std::string(to_string(p)); }

ordered_json result_to_json(const PruneResult& r, bool with_timings) {
  ordered_json j;
  j["format"] = "zspa-prune-result";
  j["format_version"] = 1;
  j["strategy"] = std::string(to_string(r.config.strategy));

  ordered_json config;
  config["strategy"] = std::string(to_string(r.config.strategy));
  config["prune_rate"] = r.config.prune_rate ? ordered_json(*r.config.prune_rate) : ordered_json();
  config["budget"] = r.config.budget ? ordered_json(*r.config.budget) : ordered_json();
  config["ratio"] = r.config.ratio;
  config["pooling"] = std::string(to_string(r.config.pooling));
  config["seed"] = r.config.rng_seed;
  config["rng"] = std::string(SplitMix64::kName);
  j["config"] = std::move(config);

  j["token_count"] = r.token_count;
  j["budget"] = r.kept_indices.size();
  j["counts"] = {{"core", r.count(Provenance::core)},
                 {"diversity", r.count(Provenance::diversity)},
                 {"sampled", r.count(Provenance::sampled)}};
  j["kept_indices"] = r.kept_indices;
  ordered_json prov = ordered_json::array();
  for (auto p : r.provenance) prov.push_back(provenance_name(p));
  j["provenance"] = std::move(prov);
  j["scores"] = r.relevance_scores;
  if (with_timings) {
    j["timings_ms"] = {{"pooling", r.timings.pooling_ms},
                       {"scoring", r.timings.scoring_ms},
                       {"core", r.timings.core_ms},
                       {"diversity", r.timings.diversity_ms},
                       {"total", r.timings.total_ms}};
  }
  return j;
}

std::string result_to_csv(const PruneResult& r) {
  std::string out = "rank,index,provenance,score\n";
  for (std::size_t i = 0; i < r.kept_indices.size(); ++i) {
    const auto idx = r.kept_indices[i];
    const std::string score =
        r.relevance_scores.empty() ? "" : fmt::format("{:.17g}", r.relevance_scores[idx]);
    out += fmt::format("{},{},{},{}\n", i, idx, to_string(r.provenance[i]), score);
  }
  return out;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  file << text;
  if (!file) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

int run_prune(const PruneArgs& a, std::ostream& out) {
  const bool has_rate = a.prune_rate_opt->count() > 0;
  const bool has_budget = a.budget_opt->count() > 0;
  if (has_rate == has_budget) throw UsageError("exactly one of --prune-rate and --budget is required");

  PruneConfig config;
  config.strategy = parse_strategy(a.strategy);
  if (has_rate) config.prune_rate = a.prune_rate;
  if (has_budget) config.budget = a.budget;
  config.ratio = a.ratio;
  config.pooling = parse_pooling(a.pooling);
  config.rng_seed = a.seed;

  const bool needs_prompt =
      config.strategy == Strategy::zspa || config.strategy == Strategy::relevance_only;
  if (needs_prompt && a.prompt.empty()) {
    throw UsageError("--prompt is required for strategy '" + a.strategy + "'");
  }

  const EmbeddingMatrix visual = read_emb(a.visual);
  const EmbeddingMatrix prompt =
      a.prompt.empty() ? EmbeddingMatrix(0, visual.cols(), {}) : read_emb(a.prompt);
  const PruneResult result = prune(prompt, visual, config);

  if (a.format == "csv") {
    emit(result_to_csv(result), a.out, out);
  } else {
    emit(result_to_json(result, a.timings).dump(2) + "\n", a.out, out);
  }
  return kExitOk;
}

int run_gen(const GenArgs& a, std::ostream& out) {
  const Scenario s = generate_scenario(a.scenario.params, a.scenario.seed);
  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());

  write_emb(s.visual, dir / "visual.emb");
  write_emb(s.prompt, dir / "prompt.emb");
  std::string mask;
  for (bool relevant : s.relevant_mask) mask += relevant ? "1\n" : "0\n";
  emit(mask, (dir / "relevant_mask.csv").string(), out);

  out << fmt::format("wrote {} visual x {} dims, {} prompt tokens, {} relevant (seed {}) to {}\n",
                     s.visual.rows(), s.visual.cols(), s.prompt.rows(), s.relevant_count(),
                     s.seed, dir.string());
  return kExitOk;
}

int run_sweep(const SweepArgs& a, std::ostream& out) {
  SweepConfig config;
  config.scenario = a.scenario.params;
  config.first_seed = a.scenario.seed;
  config.seed_count = a.seeds;
  config.strategies.clear();
  for (const auto& s : a.strategies) config.strategies.push_back(parse_strategy(s));
  config.rhos = a.rhos;
  config.prune_rates = a.prune_rates;
  config.pooling = parse_pooling(a.pooling);

  const Report report = sweep(config);
  if (!a.out.empty()) {
    std::ostringstream csv;
    write_report_csv(report, csv);
    emit(csv.str(), a.out, out);
  }
  out << format_report_table(report);
  return kExitOk;
}

const CLI::App* active_subcommand(const CLI::App& app) {
  for (const auto* sub : app.get_subcommands({})) {
    if (sub->parsed()) return sub;
  }
  return &app;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Prompt-aware visual token pruning", "zspa"};
  app.require_subcommand(1);

  PruneArgs prune_args;
  auto* prune_cmd = app.add_subcommand("prune", "Select a budgeted subset of visual tokens");
  prune_cmd->add_option("--visual", prune_args.visual, "Visual token matrix (.emb or .csv)")
      ->required();
  prune_cmd->add_option("--prompt", prune_args.prompt, "Prompt token matrix (.emb or .csv)");
  prune_cmd->add_option("--strategy", prune_args.strategy, "zspa|divprune|relevance|random")
      ->check(CLI::IsMember({"zspa", "divprune", "relevance", "random"}))
      ->capture_default_str();
  prune_args.prune_rate_opt =
      prune_cmd->add_option("--prune-rate", prune_args.prune_rate, "Fraction of tokens to drop");
  prune_args.budget_opt = prune_cmd->add_option("--budget", prune_args.budget, "Tokens to keep");
  prune_args.prune_rate_opt->excludes(prune_args.budget_opt);
  prune_cmd->add_option("--ratio", prune_args.ratio, "Core share of the budget in [0, 1]")
      ->capture_default_str();
  prune_cmd->add_option("--pooling", prune_args.pooling, "mean|max|none")
      ->check(CLI::IsMember({"mean", "max", "none"}))
      ->capture_default_str();
  prune_cmd->add_option("--seed", prune_args.seed, "Seed for the random strategy")
      ->capture_default_str();
  prune_cmd->add_option("--out", prune_args.out, "Output path (default stdout)");
  prune_cmd->add_option("--format", prune_args.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();
  prune_cmd->add_flag("--timings", prune_args.timings, "Include per-stage wall-clock timings");

  GenArgs gen_args;
  auto* gen_cmd = app.add_subcommand("gen", "Write a synthetic planted-cluster scenario");
  add_scenario_flags(gen_cmd, gen_args.scenario);
  gen_cmd->add_option("--seed", gen_args.scenario.seed, "Scenario seed")->capture_default_str();
  gen_cmd->add_option("--out-dir", gen_args.out_dir,
                      "Directory for visual.emb, prompt.emb, relevant_mask.csv")
      ->required();

  SweepArgs sweep_args;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run the ratio sweep over synthetic scenarios");
  add_scenario_flags(sweep_cmd, sweep_args.scenario);
  sweep_cmd->add_option("--first-seed", sweep_args.scenario.seed, "First scenario seed")
      ->capture_default_str();
  sweep_cmd->add_option("--seeds", sweep_args.seeds, "Scenarios averaged per cell")
      ->capture_default_str();
  sweep_cmd->add_option("--strategies", sweep_args.strategies, "Comma-separated strategies")
      ->delimiter(',')
      ->check(CLI::IsMember({"zspa", "divprune", "relevance", "random"}))
      ->capture_default_str();
  sweep_cmd->add_option("--rhos", sweep_args.rhos, "Comma-separated ratio grid")
      ->delimiter(',');
  sweep_cmd->add_option("--prune-rates", sweep_args.prune_rates, "Comma-separated prune rates")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--pooling", sweep_args.pooling, "mean|max|none")
      ->check(CLI::IsMember({"mean", "max", "none"}))
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_args.out, "CSV report path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << active_subcommand(app)->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << active_subcommand(app)->help();
    return kExitUsage;
  }

  try {
    if (prune_cmd->parsed()) return run_prune(prune_args, out);
    if (gen_cmd->parsed()) return run_gen(gen_args, out);
    if (sweep_cmd->parsed()) return run_sweep(sweep_args, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n\n" << active_subcommand(app)->help();
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitDataError;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace zspa::cli
