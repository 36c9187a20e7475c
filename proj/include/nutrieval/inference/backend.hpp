#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nutrieval/inference/nutrient_table.hpp"
#include "nutrieval/prompt/prompt.hpp"

namespace nutrieval::inference {

enum class BackendKind { kHttpChat, kTableOracle, kEchoTruth };

BackendKind backend_kind_from_string(std::string_view name);
std::string_view to_string(BackendKind kind);

struct BackendConfig {
  BackendKind kind = BackendKind::kEchoTruth;
  /// Base URL ("http://host:port") or full chat-completions URL.
  std::string endpoint_url;
  std::string model_name;
  double temperature = 0.0;
  int max_output_tokens = 64;
  double request_timeout_s = 60.0;
  int max_retries = 2;
  int parallelism = 1;
  int retry_backoff_ms = 250;
  /// Environment variable holding the bearer token; unset or empty means no auth.
  std::string api_key_env = "NUTRIEVAL_API_KEY";

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

nlohmann::ordered_json to_json(const BackendConfig& config);

struct InferenceResult {
  std::string participant_id;
  /// Exactly as returned by the backend; empty when every attempt failed.
  std::string raw_text;
  std::string backend_id;
  double latency_ms = 0.0;
  int attempt_count = 0;
  /// Empty on success, otherwise why no reply was obtained.
  std::string failure;
};

/// One reply attempt.
struct Reply {
  bool ok = false;
  std::string text;
  std::string error;
  /// Transport errors, 429 and 5xx are worth another attempt.
  bool retryable = false;
};

/// A prediction backend. Implementations must be safe to call concurrently.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string id() const = 0;
  /// Called once before any request; throws BackendError when unusable.
  virtual void preflight() {}
  virtual Reply complete(const prompt::PromptBundle& bundle) = 0;
};

/// Remote chat-completions endpoint:
///   POST {model, temperature, max_tokens, messages: [{role, content}, ...]}
///   -> choices[0].message.content
std::unique_ptr<Backend> make_http_backend(const BackendConfig& config);
/// Deterministic table lookup; replies with format_target(oracle_estimate(...)).
std::unique_ptr<Backend> make_table_oracle_backend(NutrientTable table);
/// Replies with format_target(truth) for the bundle's participant.
std::unique_ptr<Backend> make_echo_truth_backend(std::map<std::string, NutrientVector> truths);

/// Append-only JSONL log shared by inference workers.
class RunLog {
 public:
  explicit RunLog(const std::filesystem::path& path);
  void append(const InferenceResult& result);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

/// Serialized form of one result (latency is kept out so results files are
/// reproducible byte for byte; it goes to the run manifest instead).
nlohmann::ordered_json to_json(const InferenceResult& result);
InferenceResult result_from_json(const nlohmann::json& line);

/// Queries `backend` once per bundle with up to `config.parallelism`
/// concurrent requests and `config.max_retries` retries per bundle.
/// Failures become results with empty raw_text and a failure reason.
/// Every result is appended to `log` (if given) before return; the returned
/// list is sorted by participant_id.
std::vector<InferenceResult> run_inference(std::span<const prompt::PromptBundle> bundles, Backend& backend,
                                           const BackendConfig& config, RunLog* log = nullptr);

}  // namespace nutrieval::inference
