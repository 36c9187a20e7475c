#include "nutrieval/inference/run_store.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

#include "nutrieval/error.hpp"

namespace nutrieval::inference {

namespace fs = std::filesystem;

namespace {

nlohmann::ordered_json manifest_json(const RunMetadata& meta, const std::string& status) {
  return {{"status", status},
          {"started_at", meta.started_at},
          {"finished_at", meta.finished_at},
          {"seed", meta.seed},
          {"subset_index", meta.subset_index},
          {"expected_results", meta.expected_results},
          {"backend_id", meta.backend_id},
          {"prompt_sha256", meta.prompt_sha256},
          {"prompt_fidelity", meta.prompt_fidelity},
          {"config", meta.config}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  out.flush();
  if (!out) throw ConfigError("write failed for " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create run directory " + dir.string());
}

}  // namespace

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void begin_run(const fs::path& dir, const RunMetadata& meta) {
  ensure_dir(dir);
  write_text(dir / kManifestFile, manifest_json(meta, "running").dump(2) + "\n");
  write_text(dir / kResultsFile, "");
  write_text(dir / kExclusionsFile, "");
}

void persist_run(const fs::path& dir, const std::vector<InferenceResult>& results, const RunMetadata& meta) {
  ensure_dir(dir);
  auto sorted = results;
  std::sort(sorted.begin(), sorted.end(),
            [](const InferenceResult& a, const InferenceResult& b) { return a.participant_id < b.participant_id; });

  std::string lines;
  std::string exclusions;
  auto manifest = manifest_json(meta, "complete");
  auto& timings = manifest["latency_ms"] = nlohmann::ordered_json::object();
  for (const auto& r : sorted) {
    lines += to_json(r).dump() + "\n";
    if (!r.failure.empty()) {
      exclusions += nlohmann::ordered_json{{"participant_id", r.participant_id},
                                           {"stage", "backend"},
                                           {"reason", r.failure},
                                           {"attempt_count", r.attempt_count}}
                        .dump() +
                    "\n";
    }
    timings[r.participant_id] = r.latency_ms;
  }
  manifest["result_count"] = sorted.size();

  // Results first, manifest last: a crash in between leaves status "running".
  write_text(dir / kResultsFile, lines);
  write_text(dir / kExclusionsFile, exclusions);
  write_text(dir / kManifestFile, manifest.dump(2) + "\n");
}

PersistedRun load_run(const fs::path& dir, bool allow_partial) {
  PersistedRun run;
  run.dir = dir;
  {
    std::ifstream in(dir / kManifestFile, std::ios::binary);
    if (!in) throw DataError((dir / kManifestFile).string(), 0, "", "run manifest not found");
    try {
      run.manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw DataError((dir / kManifestFile).string(), 0, "", e.what());
    }
  }

  std::ifstream in(dir / kResultsFile, std::ios::binary);
  if (!in) throw DataError((dir / kResultsFile).string(), 0, "", "results file not found");
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    try {
      run.results.push_back(result_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      // A torn final line is what an interrupted run leaves behind.
      if (allow_partial && in.peek() == std::char_traits<char>::eof()) break;
      throw DataError((dir / kResultsFile).string(), row, "", e.what());
    }
  }

  const auto expected = run.manifest.value("expected_results", std::size_t{0});
  run.complete = run.manifest.value("status", "") == "complete" && run.results.size() == expected;
  if (!run.complete && !allow_partial) {
    throw DataError((dir / kResultsFile).string(), 0, "",
                    "partial run (" + std::to_string(run.results.size()) + " of " + std::to_string(expected) +
                        " results, status \"" + run.manifest.value("status", "") +
                        "\"); pass --allow-partial to score it anyway");
  }
  std::sort(run.results.begin(), run.results.end(),
            [](const InferenceResult& a, const InferenceResult& b) { return a.participant_id < b.participant_id; });
  return run;
}

}  // namespace nutrieval::inference
