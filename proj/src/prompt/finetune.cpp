#include "nutrieval/prompt/finetune.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "nutrieval/error.hpp"
#include "nutrieval/recall/food_string.hpp"

namespace nutrieval::prompt {

ExportSummary export_finetune_dataset(const recall::Cohort& cohort, const std::vector<std::string>& subset,
                                      const PromptTemplate& tmpl, const std::filesystem::path& out_path, int day) {
  if (subset.empty()) throw ConfigError("export-finetune: subset is empty; nothing to train on");

  std::vector<std::string> ids = subset;
  std::sort(ids.begin(), ids.end());

  // Validate everything before touching the output file.
  std::vector<std::string> lines;
  lines.reserve(ids.size());
  const std::string system = tmpl.system_message();
  for (const auto& id : ids) {
    const auto* truth = cohort.find_truth(id);
    if (!truth) throw DataError("export-finetune: no ground truth for participant \"" + id + "\"");
    const auto* recall = cohort.find_recall(id, day);
    if (!recall) {
      throw DataError("export-finetune: no day-" + std::to_string(day) + " recall for participant \"" + id + "\"");
    }
    const auto bundle = render_prompt(tmpl, recall::render_food_string(*recall), id);
    nlohmann::ordered_json line = {
        {"system", system}, {"user", bundle.user_message}, {"assistant", format_target(truth->values)}};
    lines.push_back(line.dump());
  }

  if (out_path.has_parent_path()) std::filesystem::create_directories(out_path.parent_path());
  std::ofstream out(out_path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + out_path.string());
  for (const auto& l : lines) out << l << '\n';
  out.flush();
  if (!out) throw ConfigError("write failed for " + out_path.string());
  return {out_path, lines.size()};
}

}  // namespace nutrieval::prompt
