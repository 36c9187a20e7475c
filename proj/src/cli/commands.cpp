#include "nutrieval/cli/commands.hpp"

#include <filesystem>

#include "nutrieval/error.hpp"
#include "nutrieval/inference/run_store.hpp"
#include "nutrieval/prompt/finetune.hpp"
#include "nutrieval/recall/food_string.hpp"

namespace nutrieval::cli {

namespace fs = std::filesystem;

namespace {

recall::Cohort eligible_cohort(const RunConfig& config, recall::FilterCounts* counts = nullptr) {
  return recall::filter_eligible(recall::load_cohort(config.participants, config.recalls, config.truth), counts);
}

prompt::PromptTemplate load_template(const RunConfig& config) {
  return config.prompt_fixture.empty() ? prompt::default_template(config.prompt_fidelity)
                                       : prompt::load_fixture(config.prompt_fixture, config.prompt_fidelity);
}

const std::vector<std::string>& subset_members(const recall::CohortPartition& partition, std::size_t subset,
                                               const fs::path& source) {
  if (subset < 1 || subset > partition.subsets.size()) {
    throw ConfigError("subset " + std::to_string(subset) + " out of range; " + source.string() + " has " +
                      std::to_string(partition.subsets.size()) + " subsets");
  }
  return partition.subsets[subset - 1];
}

recall::CohortPartition read_partition_for(const RunConfig& config) {
  const auto path = config.resolved_partition_file();
  if (!fs::exists(path)) throw DataError(path.string(), 0, "", "partition file not found; run `split` first");
  return recall::read_partition(path);
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const BackendError*>(&e)) return kExitBackend;
  if (dynamic_cast<const DataError*>(&e)) return kExitData;
  if (dynamic_cast<const ConfigError*>(&e)) return kExitUsage;
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return kExitData;
  return kExitUsage;
}

std::string describe_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size();) {
    std::size_t j = i;
    while (j < sizes.size() && sizes[j] == sizes[i]) ++j;
    if (!out.empty()) out += ' ';
    out += std::to_string(sizes[i]);
    if (j - i > 1) out += " ×" + std::to_string(j - i);
    i = j;
  }
  return out;
}

IngestSummary cmd_ingest(const RunConfig& config, std::ostream& out) {
  IngestSummary s;
  const auto cohort = recall::load_cohort(config.participants, config.recalls, config.truth);
  s.recall_item_rows = cohort.recall_item_rows;
  s.truths = cohort.truths.size();
  const auto eligible = recall::filter_eligible(cohort, &s.counts);
  s.evaluable = eligible.evaluable_ids(config.recall_day).size();

  out << s.counts.input << " loaded, " << s.counts.retained << " eligible\n";
  out << "  removed (age outside 12-19): " << s.counts.removed_age << "\n";
  out << "  removed (breastfeeding):     " << s.counts.removed_breastfeeding << "\n";
  out << "  removed (unreliable recall): " << s.counts.removed_quality << "\n";
  out << "  recall item rows: " << s.recall_item_rows << ", ground truths: " << s.truths << "\n";
  out << "  evaluable on day " << config.recall_day << ": " << s.evaluable << "\n";
  return s;
}

recall::CohortPartition cmd_split(const RunConfig& config, std::ostream& out) {
  const auto cohort = eligible_cohort(config);
  const auto partition = recall::partition_cohort(cohort.evaluable_ids(config.recall_day), config.partition);
  const auto path = config.resolved_partition_file();
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  recall::write_partition(partition, path);
  out << "wrote " << path.string() << "\n";
  out << "subset sizes: " << describe_sizes(partition.sizes()) << "\n";
  return partition;
}

void cmd_prompt(const RunConfig& config, const std::string& participant_id, std::ostream& out) {
  const auto cohort = eligible_cohort(config);
  const auto* recall = cohort.find_recall(participant_id, config.recall_day);
  if (!recall) {
    throw DataError("no eligible day-" + std::to_string(config.recall_day) + " recall for participant \"" +
                    participant_id + "\"");
  }
  const auto bundle = prompt::render_prompt(load_template(config), recall::render_food_string(*recall), participant_id);
  out << "=== SYSTEM ===\n" << bundle.system_message << "\n=== USER ===\n" << bundle.user_message << "\n";
}

fs::path cmd_run(const RunConfig& config, const RunOptions& options, std::ostream& out) {
  config.backend.validate();
  const auto cohort = eligible_cohort(config);
  const auto partition = read_partition_for(config);
  const auto& members = subset_members(partition, options.subset, config.resolved_partition_file());
  const auto tmpl = load_template(config);

  std::vector<prompt::PromptBundle> bundles;
  bundles.reserve(members.size());
  for (const auto& id : members) {
    const auto* recall = cohort.find_recall(id, config.recall_day);
    if (!recall) throw DataError("partition member \"" + id + "\" has no eligible recall in the current cohort");
    bundles.push_back(prompt::render_prompt(tmpl, recall::render_food_string(*recall), id));
  }

  std::unique_ptr<inference::Backend> backend;
  switch (config.backend.kind) {
    case inference::BackendKind::kHttpChat:
      backend = inference::make_http_backend(config.backend);
      break;
    case inference::BackendKind::kTableOracle:
      if (config.nutrient_table.empty()) throw ConfigError("table_oracle backend needs nutrient_table");
      backend = inference::make_table_oracle_backend(inference::NutrientTable::load(config.nutrient_table));
      break;
    case inference::BackendKind::kEchoTruth: {
      std::map<std::string, NutrientVector> truths;
      for (const auto& [id, t] : cohort.truths) truths.emplace(id, t.values);
      backend = inference::make_echo_truth_backend(std::move(truths));
      break;
    }
  }

  const fs::path run_dir =
      options.run_dir.empty()
          ? config.output_dir / ("run_subset" + std::to_string(options.subset) + "_" +
                                 std::string(inference::to_string(config.backend.kind)))
          : options.run_dir;

  // Fail before anything is written for an unreachable endpoint.
  backend->preflight();

  inference::RunMetadata meta;
  meta.config = to_json(config);
  meta.seed = partition.seed;
  meta.prompt_sha256 = tmpl.fixture_sha256;
  meta.prompt_fidelity = std::string(prompt::to_string(config.prompt_fidelity));
  meta.subset_index = static_cast<int>(options.subset);
  meta.expected_results = bundles.size();
  meta.backend_id = backend->id();
  meta.started_at = inference::utc_timestamp();

  inference::begin_run(run_dir, meta);
  std::vector<inference::InferenceResult> results;
  {
    inference::RunLog log(run_dir / inference::kResultsFile);
    results = inference::run_inference(bundles, *backend, config.backend, &log);
  }
  meta.finished_at = inference::utc_timestamp();
  inference::persist_run(run_dir, results, meta);

  const auto failures = std::count_if(results.begin(), results.end(),
                                      [](const inference::InferenceResult& r) { return !r.failure.empty(); });
  out << "run " << run_dir.string() << ": " << results.size() << " results (" << failures
      << " backend failures)\n";
  return run_dir;
}

eval::ScoreReport cmd_score(const fs::path& run_dir, const ScoreOptions& options, std::ostream& out) {
  const auto run = inference::load_run(run_dir, options.allow_partial);
  fs::path truth_path = options.truth;
  if (truth_path.empty()) {
    try {
      truth_path = run.manifest.at("config").at("truth").get<std::string>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("run manifest records no truth file; pass --truth");
    }
  }
  const auto truths = recall::load_ground_truth(truth_path);

  eval::ParseOptions parse;
  parse.allow_trailing_period = !options.strict;
  auto report = eval::score_results(run.results, truths, parse);

  std::string title = "Run " + run_dir.filename().string();
  if (const auto subset = run.manifest.value("subset_index", 0); subset > 0) {
    title = "Data subset #" + std::to_string(subset) + " - " + run.manifest.value("backend_id", std::string("?"));
  }
  if (!run.complete) report.warnings.push_back("scored a partial run");
  eval::write_report(report, run_dir, title);
  out << eval::render_metric_table(report, title);
  return report;
}

fs::path cmd_export_finetune(const RunConfig& config, std::ostream& out) {
  const auto cohort = eligible_cohort(config);
  const auto partition = read_partition_for(config);
  const auto& members = subset_members(partition, config.finetune_subset, config.resolved_partition_file());
  const auto summary = prompt::export_finetune_dataset(cohort, members, load_template(config),
                                                       config.resolved_finetune_output(), config.recall_day);
  out << "wrote " << summary.lines << " examples to " << summary.path.string() << "\n";
  return summary.path;
}

}  // namespace nutrieval::cli
