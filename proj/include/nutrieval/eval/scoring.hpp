#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nutrieval/eval/bland_altman.hpp"
#include "nutrieval/eval/metrics.hpp"
#include "nutrieval/eval/prediction_parser.hpp"
#include "nutrieval/inference/backend.hpp"

namespace nutrieval::eval {

/// Minimum share of valid replies before a run is flagged.
inline constexpr double kMinEffectiveFraction = 0.89;

struct Exclusion {
  std::string participant_id;
  InvalidReason reason = InvalidReason::kEmptyReply;
  std::string raw_text;
};

struct ScoreReport {
  MetricSet metrics;
  /// Present when at least two replies were valid.
  std::optional<BlandAltmanSummary> agreement;
  std::size_t total = 0;
  std::array<std::size_t, kInvalidReasonCount> excluded_by_reason{};
  std::vector<Exclusion> exclusions;
  std::vector<PredictionPair> pairs;
  bool strict = false;
  /// effective_n / total < kMinEffectiveFraction.
  bool low_effective_n = false;
  std::vector<std::string> warnings;
};

/// Parses every reply, joins valid ones to ground truth and computes the
/// metric set. Throws DataError if a result has no ground truth, or if no
/// reply at all is valid.
ScoreReport score_results(std::span<const inference::InferenceResult> results,
                          const std::map<std::string, NutrientVector>& truths, const ParseOptions& options = {});

nlohmann::ordered_json to_json(const ScoreReport& report);

/// Rows are metrics and columns the six outcomes, one block like:
///
///   (N=1,005)       DRxIKCAL    DRxIPROT ...
///   MSE           912441.584    1046.947 ...
std::string render_metric_table(const ScoreReport& report, const std::string& title = {});

/// Writes metrics.json, metrics.txt, scored_exclusions.jsonl and one
/// bland_altman_<nutrient>.svg per outcome (when agreement is present) into
/// `dir`. Returns the written paths.
std::vector<std::filesystem::path> write_report(const ScoreReport& report, const std::filesystem::path& dir,
                                                const std::string& title = {});

}  // namespace nutrieval::eval
