#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nutrieval/inference/backend.hpp"

namespace nutrieval::inference {

/// Everything needed to reproduce and audit a run. Serialized as manifest.json.
struct RunMetadata {
  /// The fully resolved run configuration.
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::uint64_t seed = 0;
  std::string prompt_sha256;
  std::string prompt_fidelity;
  /// 1-based subset the run covers; 0 when not tied to a partition.
  int subset_index = 0;
  std::size_t expected_results = 0;
  std::string backend_id;
  std::string started_at;
  std::string finished_at;
};

struct PersistedRun {
  std::filesystem::path dir;
  nlohmann::json manifest;
  std::vector<InferenceResult> results;
  bool complete = false;
};

inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kResultsFile = "results.jsonl";
inline constexpr const char* kExclusionsFile = "exclusions.jsonl";

/// UTC "YYYY-MM-DDTHH:MM:SSZ".
std::string utc_timestamp();

/// Marks `dir` as an in-progress run: writes manifest.json with status
/// "running" and truncates results.jsonl so workers can append to it.
void begin_run(const std::filesystem::path& dir, const RunMetadata& meta);

/// Writes manifest.json (status "complete", per-result latency), results.jsonl
/// sorted by participant, and exclusions.jsonl listing backend failures.
/// Throws ConfigError if the directory cannot be written.
void persist_run(const std::filesystem::path& dir, const std::vector<InferenceResult>& results,
                 const RunMetadata& meta);

/// Reads a run back. Unless `allow_partial`, a run whose manifest is not
/// complete or whose results file is short is refused with a DataError.
PersistedRun load_run(const std::filesystem::path& dir, bool allow_partial = false);

}  // namespace nutrieval::inference
