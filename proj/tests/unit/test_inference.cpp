#include <atomic>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "json.hpp"
#include "nutrieval/error.hpp"
#include "nutrieval/inference/backend.hpp"
#include "nutrieval/inference/nutrient_table.hpp"
#include "nutrieval/inference/run_store.hpp"
#include "nutrieval/prompt/prompt.hpp"
#include "nutrieval/recall/food_string.hpp"
#include "synthetic.hpp"

using namespace nutrieval;
using namespace nutrieval::inference;
namespace nt = nutrieval::testing;

namespace {

NutrientTable taffy_table() {
  NutrientTable t;
  t.add("TAFFY", {{400, 1, 90, 70, 0, 8}});
  t.add("BREAD, WHITE", {{266, 7.6, 50.6, 5.7, 2.4, 3.3}});
  return t;
}

prompt::PromptBundle bundle(const std::string& id, const std::string& food) {
  return prompt::render_prompt(prompt::default_template(), food, id);
}

/// Chat-completions stub on a random local port.
struct StubServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> hits{0};
  nlohmann::json last_request;
  std::string last_auth;
  std::mutex mu;

  explicit StubServer(std::function<void(const httplib::Request&, httplib::Response&, int)> handler) {
    server.Get("/", [](const httplib::Request&, httplib::Response& res) { res.set_content("ok", "text/plain"); });
    server.Post("/v1/chat/completions", [this, handler](const httplib::Request& req, httplib::Response& res) {
      const int n = ++hits;
      {
        std::lock_guard lock(mu);
        last_request = nlohmann::json::parse(req.body);
        last_auth = req.get_header_value("Authorization");
      }
      handler(req, res, n);
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~StubServer() {
    server.stop();
    thread.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port); }
};

std::string envelope(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST_CASE("oracle_estimate scales per-100 g rows") {
  const auto t = taffy_table();
  auto v = oracle_estimate(recall::parse_food_string("TAFFY (15.6)"), t);
  CHECK(prompt::format_target(v) == "62.4; 0.16; 14.04; 10.92; 0; 1.25");

  CHECK(oracle_estimate({}, t) == NutrientVector{});
  CHECK(oracle_estimate(recall::parse_food_string("TAFFY (100)"), t) == *t.find("TAFFY"));

  auto halves = oracle_estimate(recall::parse_food_string("TAFFY (50); TAFFY (50)"), t);
  auto whole = oracle_estimate(recall::parse_food_string("TAFFY (100)"), t);
  for (std::size_t k = 0; k < 6; ++k) CHECK(halves.values[k] == doctest::Approx(whole.values[k]).epsilon(1e-12));

  try {
    oracle_estimate(recall::parse_food_string("KALE (10)"), t);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("KALE") != std::string::npos);
  }
}

TEST_CASE("nutrient table validation and loading") {
  NutrientTable t;
  CHECK_THROWS_AS(t.add("taffy", {}), DataError);
  CHECK_THROWS_AS(t.add("A; B", {}), DataError);
  CHECK_THROWS_AS(t.add("NEG", {{-1, 0, 0, 0, 0, 0}}), DataError);

  nt::TempDir dir("table");
  nt::write_text(dir / "t.csv",
                 "descriptor,kcal_100g,protein_100g,carb_100g,sugar_100g,fiber_100g,fat_100g\n"
                 "\"MILK, LOW FAT (1%)\",42,3.37,4.99,5.2,0,0.97\n");
  auto loaded = NutrientTable::load(dir / "t.csv");
  CHECK(loaded.size() == 1);
  REQUIRE(loaded.find("MILK, LOW FAT (1%)"));
  CHECK(loaded.find("MILK, LOW FAT (1%)")->protein_g() == 3.37);
}

TEST_CASE("offline backends") {
  auto oracle = make_table_oracle_backend(taffy_table());
  auto r = oracle->complete(bundle("A", "TAFFY (15.6)"));
  CHECK(r.ok);
  CHECK(r.text == "62.4; 0.16; 14.04; 10.92; 0; 1.25");
  CHECK_FALSE(oracle->complete(bundle("A", "KALE (1)")).ok);

  std::map<std::string, NutrientVector> truths;
  for (int i = 0; i < 5; ++i) truths["e" + std::to_string(i)] = NutrientVector{{100.0 * i, 1, 2, 3, 4, 5.5}};
  auto echo = make_echo_truth_backend(truths);
  std::vector<prompt::PromptBundle> bundles;
  for (const auto& [id, _] : truths) bundles.push_back(bundle(id, "TAFFY (1)"));
  BackendConfig cfg;
  auto results = run_inference(bundles, *echo, cfg);
  REQUIRE(results.size() == 5);
  for (const auto& res : results) {
    CHECK(res.raw_text == prompt::format_target(truths.at(res.participant_id)));
    CHECK(res.failure.empty());
    CHECK(res.attempt_count == 1);
  }
  CHECK_FALSE(echo->complete(bundle("unknown", "TAFFY (1)")).ok);
}

TEST_CASE("run_inference sorts by id and records failures") {
  std::vector<prompt::PromptBundle> bundles;
  for (const char* id : {"c", "a", "b", "d"}) bundles.push_back(bundle(id, std::string(id) == "d" ? "KALE (1)" : "TAFFY (10)"));
  auto backend = make_table_oracle_backend(taffy_table());
  BackendConfig cfg;
  cfg.parallelism = 3;
  cfg.max_retries = 0;
  nt::TempDir dir("log");
  std::vector<InferenceResult> results;
  {
    RunLog log(dir / "log.jsonl");
    results = run_inference(bundles, *backend, cfg, &log);
  }
  REQUIRE(results.size() == 4);
  CHECK(results[0].participant_id == "a");
  CHECK(results[3].participant_id == "d");
  CHECK(results[3].raw_text.empty());
  CHECK_FALSE(results[3].failure.empty());
  const auto log_text = nt::read_text(dir / "log.jsonl");
  CHECK(std::count(log_text.begin(), log_text.end(), '\n') == 4);
}

TEST_CASE("backend config validation") {
  BackendConfig c;
  CHECK_NOTHROW(c.validate());
  c.parallelism = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.temperature = -1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.kind = BackendKind::kHttpChat;
  CHECK_THROWS_AS(c.validate(), ConfigError);  // no endpoint
  CHECK(backend_kind_from_string("table_oracle") == BackendKind::kTableOracle);
  CHECK_THROWS_AS(backend_kind_from_string("magic"), ConfigError);
}

TEST_CASE("http_chat passes the reply through verbatim") {
  StubServer stub([](const httplib::Request&, httplib::Response& res, int) {
    res.set_content(envelope(" 1; 2; 3; 4; 5; 6 \n"), "application/json");
  });
  ::setenv("NUTRIEVAL_TEST_KEY", "sekrit", 1);
  BackendConfig cfg;
  cfg.kind = BackendKind::kHttpChat;
  cfg.endpoint_url = stub.url();
  cfg.model_name = "stub-model";
  cfg.api_key_env = "NUTRIEVAL_TEST_KEY";
  cfg.max_output_tokens = 32;
  auto backend = make_http_backend(cfg);
  backend->preflight();
  std::vector<prompt::PromptBundle> bundles{bundle("x", "TAFFY (15.6)"), bundle("y", "TAFFY (1)")};
  cfg.parallelism = 2;
  auto results = run_inference(bundles, *backend, cfg);
  REQUIRE(results.size() == 2);
  CHECK(results[0].raw_text == " 1; 2; 3; 4; 5; 6 \n");
  CHECK(results[1].raw_text == " 1; 2; 3; 4; 5; 6 \n");

  std::lock_guard lock(stub.mu);
  CHECK(stub.last_auth == "Bearer sekrit");
  CHECK(stub.last_request.at("model") == "stub-model");
  CHECK(stub.last_request.at("temperature") == 0.0);
  CHECK(stub.last_request.at("max_tokens") == 32);
  const auto& msgs = stub.last_request.at("messages");
  REQUIRE(msgs.size() == 2);
  CHECK(msgs[0].at("role") == "system");
  CHECK(msgs[1].at("role") == "user");
  CHECK(msgs[0].at("content").get<std::string>() == prompt::default_template().system_message());
}

TEST_CASE("http_chat retries 5xx and records malformed envelopes") {
  StubServer stub([](const httplib::Request& req, httplib::Response& res, int hit) {
    auto j = nlohmann::json::parse(req.body);
    const auto user = j["messages"][1]["content"].get<std::string>();
    if (user.find("BROKEN") != std::string::npos) {
      res.set_content("{\"nope\": 1}", "application/json");
    } else if (hit == 1) {
      res.status = 503;
    } else {
      res.set_content(envelope("7; 7; 7; 7; 7; 7"), "application/json");
    }
  });
  BackendConfig cfg;
  cfg.kind = BackendKind::kHttpChat;
  cfg.endpoint_url = stub.url() + "/v1/chat/completions";
  cfg.retry_backoff_ms = 1;
  cfg.max_retries = 2;
  auto backend = make_http_backend(cfg);
  auto ok = run_inference(std::vector{bundle("a", "TAFFY (1)")}, *backend, cfg);
  CHECK(ok[0].raw_text == "7; 7; 7; 7; 7; 7");
  CHECK(ok[0].attempt_count == 2);

  auto bad = run_inference(std::vector{bundle("b", "BROKEN (1)")}, *backend, cfg);
  CHECK(bad[0].raw_text.empty());
  CHECK(bad[0].failure.find("malformed_envelope") != std::string::npos);
  CHECK(bad[0].attempt_count <= cfg.max_retries + 1);
}

TEST_CASE("http_chat preflight fails fast on an unreachable endpoint") {
  BackendConfig cfg;
  cfg.kind = BackendKind::kHttpChat;
  cfg.endpoint_url = "http://127.0.0.1:1";
  cfg.request_timeout_s = 1;
  auto backend = make_http_backend(cfg);
  CHECK_THROWS_AS(backend->preflight(), BackendError);
}

TEST_CASE("persisted runs replay and refuse partial reads") {
  nt::TempDir dir("run");
  RunMetadata meta;
  meta.seed = 9;
  meta.prompt_sha256 = std::string(prompt::kFixtureSha256);
  meta.expected_results = 3;
  meta.backend_id = "echo_truth";
  meta.started_at = utc_timestamp();

  std::vector<InferenceResult> results;
  for (const char* id : {"b", "a", "c"}) results.push_back({id, "1; 2; 3; 4; 5; 6", "echo_truth", 1.5, 1, ""});
  results[2].raw_text.clear();
  results[2].failure = "transport: boom";

  begin_run(dir.path(), meta);
  CHECK_THROWS_AS(load_run(dir.path()), DataError);
  CHECK_NOTHROW(load_run(dir.path(), true));

  persist_run(dir.path(), results, meta);
  const auto results_text = nt::read_text(dir.path() / kResultsFile);
  CHECK(std::count(results_text.begin(), results_text.end(), '\n') == 3);
  CHECK(results_text.find("latency") == std::string::npos);
  CHECK(std::filesystem::exists(dir.path() / kManifestFile));
  const auto excl = nt::read_text(dir.path() / kExclusionsFile);
  CHECK(std::count(excl.begin(), excl.end(), '\n') == 1);

  auto run = load_run(dir.path());
  CHECK(run.complete);
  REQUIRE(run.results.size() == 3);
  CHECK(run.results[0].participant_id == "a");
  CHECK(run.manifest.at("prompt_sha256") == std::string(prompt::kFixtureSha256));
  CHECK(run.manifest.at("seed") == 9);

  // Truncated results with a complete manifest are refused too.
  nt::write_text(dir.path() / kResultsFile, results_text.substr(0, results_text.find('\n') + 1));
  CHECK_THROWS_AS(load_run(dir.path()), DataError);

  CHECK(result_from_json(to_json(results[0])).raw_text == results[0].raw_text);
}
