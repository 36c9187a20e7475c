#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "nutrieval/cli/run_config.hpp"
#include "nutrieval/eval/scoring.hpp"
#include "nutrieval/recall/cohort.hpp"

namespace nutrieval::cli {

/// Stable process exit codes.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2, kExitBackend = 3 };

/// Maps a caught exception to its exit code.
int exit_code_for(const std::exception& e);

struct IngestSummary {
  recall::FilterCounts counts;
  std::size_t recall_item_rows = 0;
  std::size_t truths = 0;
  /// Eligible participants with a recall on the configured day and a truth.
  std::size_t evaluable = 0;
};

/// Loads and filters the cohort; prints "<n> loaded, <m> eligible" and
/// the count removed by each criterion.
IngestSummary cmd_ingest(const RunConfig& config, std::ostream& out);

/// Partitions the evaluable cohort and writes the partition JSON.
recall::CohortPartition cmd_split(const RunConfig& config, std::ostream& out);

/// Renders one participant's prompt (system and user message) to `out`.
void cmd_prompt(const RunConfig& config, const std::string& participant_id, std::ostream& out);

struct RunOptions {
  /// 1-based subset of the partition file.
  std::size_t subset = 2;
  /// Defaults to <output_dir>/run_subset<k>_<backend>.
  std::filesystem::path run_dir;
};

/// Renders prompts for a subset, queries the backend and persists the run.
std::filesystem::path cmd_run(const RunConfig& config, const RunOptions& options, std::ostream& out);

struct ScoreOptions {
  bool allow_partial = false;
  bool strict = false;
  /// Overrides the truth file recorded in the run manifest.
  std::filesystem::path truth;
};

/// Scores a persisted run and writes metrics.json, metrics.txt, exclusions
/// and Bland-Altman SVGs into the run directory.
eval::ScoreReport cmd_score(const std::filesystem::path& run_dir, const ScoreOptions& options, std::ostream& out);

/// Exports the fine-tuning JSONL for the configured subset; prints
/// "wrote <n> examples to <path>".
std::filesystem::path cmd_export_finetune(const RunConfig& config, std::ostream& out);

/// "1129 1128 ×9": runs of equal sizes collapsed.
std::string describe_sizes(const std::vector<std::size_t>& sizes);

}  // namespace nutrieval::cli
