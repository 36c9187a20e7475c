// nutrieval command-line front end.
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "nutrieval/cli/commands.hpp"
#include "nutrieval/error.hpp"

namespace cli = nutrieval::cli;

int main(int argc, char** argv) {
  CLI::App app{"Dietary recall nutrient estimation: ingest, split, prompt, run, score"};
  app.require_subcommand(1);
  // Global flags may also follow the subcommand.
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool no_shuffle = false;
  app.add_option("-c,--config", config_path, "Run configuration file (key = value)");
  app.add_option("--seed", seed, "Override the partition seed");
  app.add_flag("--no-shuffle", no_shuffle, "Partition in file order");
  cli::ScoreOptions score_opts;
  app.add_flag("--strict", score_opts.strict, "Reject replies with a trailing period");
  app.add_flag("--allow-partial", score_opts.allow_partial, "Score an interrupted run");

  auto* ingest = app.add_subcommand("ingest", "Load, validate and filter the cohort");
  auto* split = app.add_subcommand("split", "Write the subset partition");

  auto* prompt = app.add_subcommand("prompt", "Print the rendered prompt for one participant");
  std::string participant;
  prompt->add_option("participant_id", participant)->required();

  auto* run = app.add_subcommand("run", "Query a backend for one subset and persist the run");
  cli::RunOptions run_opts;
  std::string backend_override;
  run->add_option("-s,--subset", run_opts.subset, "1-based subset index")->capture_default_str();
  run->add_option("--run-dir", run_opts.run_dir, "Output directory for this run");
  run->add_option("--backend", backend_override, "http_chat, table_oracle or echo_truth");

  auto* score = app.add_subcommand("score", "Score a persisted run");
  std::string run_dir;
  score->add_option("run_dir", run_dir)->required();
  score->add_option("--truth", score_opts.truth, "Ground-truth CSV (default: the one recorded in the run)");

  auto* finetune = app.add_subcommand("export-finetune", "Write fine-tuning JSONL for one subset");
  std::optional<std::size_t> ft_subset;
  std::string ft_output;
  finetune->add_option("-s,--subset", ft_subset, "1-based subset index");
  finetune->add_option("-o,--output", ft_output, "Output JSONL path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kExitOk : cli::kExitUsage;
  }

  try {
    if (score->parsed()) {
      cli::cmd_score(run_dir, score_opts, std::cout);
      return cli::kExitOk;
    }

    if (config_path.empty()) throw nutrieval::ConfigError("--config is required for this command");
    auto config = cli::load_config(config_path);
    if (seed) config.partition.seed = *seed;
    if (no_shuffle) config.partition.shuffle = false;

    if (ingest->parsed()) {
      cli::cmd_ingest(config, std::cout);
    } else if (split->parsed()) {
      cli::cmd_split(config, std::cout);
    } else if (prompt->parsed()) {
      cli::cmd_prompt(config, participant, std::cout);
    } else if (run->parsed()) {
      if (!backend_override.empty()) {
        config.backend.kind = nutrieval::inference::backend_kind_from_string(backend_override);
      }
      cli::cmd_run(config, run_opts, std::cout);
    } else if (finetune->parsed()) {
      if (ft_subset) config.finetune_subset = *ft_subset;
      if (!ft_output.empty()) config.finetune_output = ft_output;
      cli::cmd_export_finetune(config, std::cout);
    }
    return cli::kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
}
