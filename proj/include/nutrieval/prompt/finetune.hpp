#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "nutrieval/prompt/prompt.hpp"
#include "nutrieval/recall/cohort.hpp"

namespace nutrieval::prompt {

struct ExportSummary {
  std::filesystem::path path;
  std::size_t lines = 0;
};

/// Writes one chat-style training example per line:
///   {"system": <system message>, "user": <user message>, "assistant": format_target(truth)}
/// UTF-8, LF endings, members ordered by participant_id.
///
/// Throws ConfigError for an empty subset and DataError when a member has no
/// recall for `day` or no ground truth.
ExportSummary export_finetune_dataset(const recall::Cohort& cohort, const std::vector<std::string>& subset,
                                      const PromptTemplate& tmpl, const std::filesystem::path& out_path,
                                      int day = 2);

}  // namespace nutrieval::prompt
