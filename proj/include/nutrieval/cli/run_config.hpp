#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "nutrieval/inference/backend.hpp"
#include "nutrieval/prompt/prompt.hpp"
#include "nutrieval/recall/partition.hpp"

namespace nutrieval::cli {

/// Resolved configuration for every subcommand.
///
/// The config file is flat `key = value` lines; `#` starts a comment. Relative
/// paths resolve against the config file's directory. Secrets never live in
/// the file: the bearer token is read from the environment variable named by
/// `api_key_env`.
struct RunConfig {
  std::filesystem::path participants = "participants.csv";
  std::filesystem::path recalls = "recalls.csv";
  std::filesystem::path truth = "truth.csv";
  std::filesystem::path nutrient_table;
  std::filesystem::path output_dir = "runs";
  /// Defaults to <output_dir>/partition.json.
  std::filesystem::path partition_file;
  /// Empty means the fixture compiled into the library.
  std::filesystem::path prompt_fixture;
  prompt::Fidelity prompt_fidelity = prompt::Fidelity::kVerbatim;
  int recall_day = 2;

  recall::PartitionOptions partition;
  inference::BackendConfig backend;

  std::size_t finetune_subset = 1;
  /// Defaults to <output_dir>/finetune_subset<k>.jsonl.
  std::filesystem::path finetune_output;

  std::filesystem::path resolved_partition_file() const;
  std::filesystem::path resolved_finetune_output() const;
};

/// Applies `key = value` pairs to a default config. Throws ConfigError on an
/// unknown key or a malformed value.
RunConfig config_from_pairs(const std::map<std::string, std::string>& pairs,
                            const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source);

nlohmann::ordered_json to_json(const RunConfig& config);

}  // namespace nutrieval::cli
