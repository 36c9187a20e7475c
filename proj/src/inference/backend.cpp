#include "nutrieval/inference/backend.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "nutrieval/error.hpp"
#include "nutrieval/recall/food_string.hpp"

namespace nutrieval::inference {

BackendKind backend_kind_from_string(std::string_view name) {
  if (name == "http_chat") return BackendKind::kHttpChat;
  if (name == "table_oracle") return BackendKind::kTableOracle;
  if (name == "echo_truth") return BackendKind::kEchoTruth;
  throw ConfigError("backend must be http_chat, table_oracle or echo_truth, got \"" + std::string(name) + "\"");
}

std::string_view to_string(BackendKind kind) {
  switch (kind) {
    case BackendKind::kHttpChat: return "http_chat";
    case BackendKind::kTableOracle: return "table_oracle";
    case BackendKind::kEchoTruth: return "echo_truth";
  }
  return "unknown";
}

void BackendConfig::validate() const {
  if (temperature < 0.0) throw ConfigError("backend: temperature must be >= 0");
  if (max_output_tokens <= 0) throw ConfigError("backend: max_output_tokens must be > 0");
  if (request_timeout_s <= 0.0) throw ConfigError("backend: request_timeout must be > 0");
  if (max_retries < 0) throw ConfigError("backend: max_retries must be >= 0");
  if (parallelism < 1 || parallelism > 256) throw ConfigError("backend: parallelism must be in [1, 256]");
  if (retry_backoff_ms < 0) throw ConfigError("backend: retry_backoff_ms must be >= 0");
  if (kind == BackendKind::kHttpChat && endpoint_url.empty()) {
    throw ConfigError("backend: http_chat needs endpoint_url");
  }
}

nlohmann::ordered_json to_json(const BackendConfig& c) {
  return {{"kind", to_string(c.kind)},
          {"endpoint_url", c.endpoint_url},
          {"model_name", c.model_name},
          {"temperature", c.temperature},
          {"max_output_tokens", c.max_output_tokens},
          {"request_timeout_s", c.request_timeout_s},
          {"max_retries", c.max_retries},
          {"parallelism", c.parallelism},
          {"retry_backoff_ms", c.retry_backoff_ms},
          {"api_key_env", c.api_key_env}};
}

namespace {

class HttpChatBackend final : public Backend {
 public:
  explicit HttpChatBackend(BackendConfig config) : config_(std::move(config)) {
    const auto& url = config_.endpoint_url;
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("backend: endpoint_url needs a scheme: " + url);
    const auto path_at = url.find('/', scheme_end + 3);
    base_ = path_at == std::string::npos ? url : url.substr(0, path_at);
    path_ = path_at == std::string::npos ? "" : url.substr(path_at);
    if (path_.empty() || path_ == "/") path_ = "/v1/chat/completions";
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) token_ = key;
  }

  std::string id() const override { return "http_chat:" + config_.model_name; }

  void preflight() override {
    auto cli = client();
    cli.set_read_timeout(std::chrono::seconds(5));
    auto res = cli.Get("/");
    if (!res && res.error() != httplib::Error::Read) {
      throw BackendError("endpoint unreachable: " + base_ + " (" + httplib::to_string(res.error()) + ")");
    }
  }

  Reply complete(const prompt::PromptBundle& bundle) override {
    const nlohmann::json request = {
        {"model", config_.model_name},
        {"temperature", config_.temperature},
        {"max_tokens", config_.max_output_tokens},
        {"messages",
         {{{"role", "system"}, {"content", bundle.system_message}},
          {{"role", "user"}, {"content", bundle.user_message}}}}};

    auto cli = client();
    httplib::Headers headers;
    if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);
    auto res = cli.Post(path_, headers, request.dump(), "application/json");

    Reply reply;
    if (!res) {
      reply.error = "transport: " + httplib::to_string(res.error());
      reply.retryable = true;
      return reply;
    }
    if (res->status != 200) {
      reply.error = "http status " + std::to_string(res->status);
      reply.retryable = res->status == 429 || res->status >= 500;
      return reply;
    }
    try {
      const auto body = nlohmann::json::parse(res->body);
      reply.text = body.at("choices").at(0).at("message").at("content").get<std::string>();
      reply.ok = true;
    } catch (const nlohmann::json::exception&) {
      reply.error = "malformed_envelope";
    }
    return reply;
  }

 private:
  httplib::Client client() const {
    httplib::Client cli(base_);
    const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.request_timeout_s));
    cli.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                               static_cast<time_t>(timeout.count() % 1000000));
    cli.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                         static_cast<time_t>(timeout.count() % 1000000));
    cli.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                          static_cast<time_t>(timeout.count() % 1000000));
    return cli;
  }

  BackendConfig config_;
  std::string base_;
  std::string path_;
  std::string token_;
};

class TableOracleBackend final : public Backend {
 public:
  explicit TableOracleBackend(NutrientTable table) : table_(std::move(table)) {}
  std::string id() const override { return "table_oracle"; }

  Reply complete(const prompt::PromptBundle& bundle) override {
    Reply reply;
    try {
      const auto items = recall::parse_food_string(bundle.food_string);
      reply.text = prompt::format_target(oracle_estimate(items, table_));
      reply.ok = true;
    } catch (const DataError& e) {
      reply.error = e.what();
    }
    return reply;
  }

 private:
  NutrientTable table_;
};

class EchoTruthBackend final : public Backend {
 public:
  explicit EchoTruthBackend(std::map<std::string, NutrientVector> truths) : truths_(std::move(truths)) {}
  std::string id() const override { return "echo_truth"; }

  Reply complete(const prompt::PromptBundle& bundle) override {
    Reply reply;
    if (auto it = truths_.find(bundle.participant_id); it != truths_.end()) {
      reply.text = prompt::format_target(it->second);
      reply.ok = true;
    } else {
      reply.error = "no ground truth for participant";
    }
    return reply;
  }

 private:
  std::map<std::string, NutrientVector> truths_;
};

InferenceResult query_with_retries(const prompt::PromptBundle& bundle, Backend& backend, const BackendConfig& config) {
  InferenceResult result;
  result.participant_id = bundle.participant_id;
  result.backend_id = backend.id();
  const auto start = std::chrono::steady_clock::now();
  auto backoff = std::chrono::milliseconds(config.retry_backoff_ms);
  for (int attempt = 0; attempt <= config.max_retries; ++attempt) {
    result.attempt_count = attempt + 1;
    Reply reply;
    try {
      reply = backend.complete(bundle);
    } catch (const std::exception& e) {
      reply.error = std::string("backend exception: ") + e.what();
    }
    if (reply.ok) {
      result.raw_text = reply.text;
      result.failure.clear();
      break;
    }
    result.failure = reply.error;
    if (!reply.retryable || attempt == config.max_retries) break;
    std::this_thread::sleep_for(backoff);
    backoff *= 2;
  }
  result.latency_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace

std::unique_ptr<Backend> make_http_backend(const BackendConfig& config) {
  return std::make_unique<HttpChatBackend>(config);
}

std::unique_ptr<Backend> make_table_oracle_backend(NutrientTable table) {
  return std::make_unique<TableOracleBackend>(std::move(table));
}

std::unique_ptr<Backend> make_echo_truth_backend(std::map<std::string, NutrientVector> truths) {
  return std::make_unique<EchoTruthBackend>(std::move(truths));
}

RunLog::RunLog(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::app) {
  if (!out_) throw ConfigError("cannot open run log " + path.string());
}

void RunLog::append(const InferenceResult& result) {
  const auto line = to_json(result).dump();
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
}

nlohmann::ordered_json to_json(const InferenceResult& r) {
  return {{"participant_id", r.participant_id},
          {"raw_text", r.raw_text},
          {"backend_id", r.backend_id},
          {"attempt_count", r.attempt_count},
          {"failure", r.failure}};
}

InferenceResult result_from_json(const nlohmann::json& line) {
  InferenceResult r;
  r.participant_id = line.at("participant_id").get<std::string>();
  r.raw_text = line.at("raw_text").get<std::string>();
  r.backend_id = line.value("backend_id", "");
  r.attempt_count = line.value("attempt_count", 1);
  r.failure = line.value("failure", "");
  return r;
}

std::vector<InferenceResult> run_inference(std::span<const prompt::PromptBundle> bundles, Backend& backend,
                                           const BackendConfig& config, RunLog* log) {
  config.validate();
  backend.preflight();

  std::vector<InferenceResult> results(bundles.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < bundles.size(); i = next++) {
      results[i] = query_with_retries(bundles[i], backend, config);
      if (log) log->append(results[i]);
    }
  };

  const auto n_workers = std::min<std::size_t>(static_cast<std::size_t>(config.parallelism), bundles.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }

  std::sort(results.begin(), results.end(),
            [](const InferenceResult& a, const InferenceResult& b) { return a.participant_id < b.participant_id; });
  return results;
}

}  // namespace nutrieval::inference
