#include "nutrieval/cli/run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "nutrieval/error.hpp"

namespace nutrieval::cli {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("config: " + key + " is not a valid number: \"" + value + "\"");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("config: " + key + " must be true or false, got \"" + value + "\"");
}

fs::path resolve(const fs::path& base, const std::string& value) {
  fs::path p(value);
  return (p.is_relative() && !base.empty()) ? base / p : p;
}

}  // namespace

fs::path RunConfig::resolved_partition_file() const {
  return partition_file.empty() ? output_dir / "partition.json" : partition_file;
}

fs::path RunConfig::resolved_finetune_output() const {
  return finetune_output.empty() ? output_dir / ("finetune_subset" + std::to_string(finetune_subset) + ".jsonl")
                                 : finetune_output;
}

std::map<std::string, std::string> parse_key_values(std::string_view text, const std::string& source) {
  std::map<std::string, std::string> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = std::string(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    out[key] = std::string(trim(line.substr(eq + 1)));
  }
  return out;
}

RunConfig config_from_pairs(const std::map<std::string, std::string>& pairs, const fs::path& base_dir) {
  RunConfig c;
  for (const auto& [key, value] : pairs) {
    if (key == "participants") {
      c.participants = resolve(base_dir, value);
    } else if (key == "recalls") {
      c.recalls = resolve(base_dir, value);
    } else if (key == "truth") {
      c.truth = resolve(base_dir, value);
    } else if (key == "nutrient_table") {
      c.nutrient_table = resolve(base_dir, value);
    } else if (key == "output_dir") {
      c.output_dir = resolve(base_dir, value);
    } else if (key == "partition_file") {
      c.partition_file = resolve(base_dir, value);
    } else if (key == "prompt_fixture") {
      c.prompt_fixture = resolve(base_dir, value);
    } else if (key == "prompt_fidelity") {
      c.prompt_fidelity = prompt::fidelity_from_string(value);
    } else if (key == "recall_day") {
      c.recall_day = parse_number<int>(key, value);
      if (c.recall_day != 1 && c.recall_day != 2) throw ConfigError("config: recall_day must be 1 or 2");
    } else if (key == "n_subsets") {
      c.partition.n_subsets = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      c.partition.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "first_subset_extra") {
      c.partition.first_subset_extra = parse_bool(key, value);
    } else if (key == "shuffle") {
      c.partition.shuffle = parse_bool(key, value);
    } else if (key == "backend") {
      c.backend.kind = inference::backend_kind_from_string(value);
    } else if (key == "endpoint_url") {
      c.backend.endpoint_url = value;
    } else if (key == "model") {
      c.backend.model_name = value;
    } else if (key == "temperature") {
      c.backend.temperature = parse_number<double>(key, value);
    } else if (key == "max_output_tokens") {
      c.backend.max_output_tokens = parse_number<int>(key, value);
    } else if (key == "request_timeout_s") {
      c.backend.request_timeout_s = parse_number<double>(key, value);
    } else if (key == "max_retries") {
      c.backend.max_retries = parse_number<int>(key, value);
    } else if (key == "parallelism") {
      c.backend.parallelism = parse_number<int>(key, value);
    } else if (key == "retry_backoff_ms") {
      c.backend.retry_backoff_ms = parse_number<int>(key, value);
    } else if (key == "api_key_env") {
      c.backend.api_key_env = value;
    } else if (key == "finetune_subset") {
      c.finetune_subset = parse_number<std::size_t>(key, value);
    } else if (key == "finetune_output") {
      c.finetune_output = resolve(base_dir, value);
    } else {
      throw ConfigError("config: unknown key \"" + key + "\"");
    }
  }
  c.backend.validate();
  return c;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_pairs(parse_key_values(ss.str(), path.string()), path.parent_path());
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  return {{"participants", c.participants.string()},
          {"recalls", c.recalls.string()},
          {"truth", c.truth.string()},
          {"nutrient_table", c.nutrient_table.string()},
          {"output_dir", c.output_dir.string()},
          {"partition_file", c.resolved_partition_file().string()},
          {"prompt_fixture", c.prompt_fixture.string()},
          {"prompt_fidelity", prompt::to_string(c.prompt_fidelity)},
          {"recall_day", c.recall_day},
          {"partition",
           {{"n_subsets", c.partition.n_subsets},
            {"seed", c.partition.seed},
            {"first_subset_extra", c.partition.first_subset_extra},
            {"shuffle", c.partition.shuffle}}},
          {"backend", inference::to_json(c.backend)},
          {"finetune_subset", c.finetune_subset},
          {"finetune_output", c.resolved_finetune_output().string()}};
}

}  // namespace nutrieval::cli
