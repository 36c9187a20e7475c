#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nutrieval/nutrients.hpp"

namespace nutrieval::recall {

enum class Sex { kMale, kFemale, kUnknown };
enum class RecallQuality { kReliable, kUnreliable };

struct ParticipantRecord {
  std::string participant_id;
  int age_years = 0;
  Sex sex = Sex::kUnknown;
  bool breastfeeding = false;
  RecallQuality recall_quality = RecallQuality::kReliable;
};

struct FoodItem {
  std::string food_code;
  std::string descriptor;
  double grams = 0.0;
};

struct DietaryRecall {
  std::string participant_id;
  int day = 2;
  std::vector<FoodItem> items;
};

struct GroundTruth {
  std::string participant_id;
  NutrientVector values;
};

/// Participants, their recalls and ground truths, cross-checked on load.
///
/// Participants keep file order. Recalls are keyed by (participant, day) with
/// items ordered by `seq`; truths are keyed by participant.
class Cohort {
 public:
  std::vector<ParticipantRecord> participants;
  std::map<std::pair<std::string, int>, DietaryRecall> recalls;
  std::map<std::string, GroundTruth> truths;

  std::size_t recall_item_rows = 0;

  const DietaryRecall* find_recall(const std::string& participant_id, int day) const;
  const GroundTruth* find_truth(const std::string& participant_id) const;
  bool contains(const std::string& participant_id) const;

  /// Ids of participants that have a recall for `day` and a ground truth, in
  /// participant file order. This is the population that gets partitioned.
  std::vector<std::string> evaluable_ids(int day) const;
};

/// Loads the three canonical CSV exports.
///
///   participants.csv  participant_id,age_years,sex,breastfeeding,recall_quality
///   recalls.csv       participant_id,day,seq,food_code,descriptor,grams
///   truth.csv         participant_id,kcal,protein_g,carb_g,sugar_g,fiber_g,fat_g
///
/// Every error is a DataError naming the offending file, row and column.
Cohort load_cohort(const std::filesystem::path& participants_path, const std::filesystem::path& recalls_path,
                   const std::filesystem::path& truth_path);

/// Reads truth.csv on its own (no participant cross-check), keyed by id.
std::map<std::string, NutrientVector> load_ground_truth(const std::filesystem::path& truth_path);

struct FilterCounts {
  std::size_t input = 0;
  std::size_t removed_age = 0;
  std::size_t removed_breastfeeding = 0;
  std::size_t removed_quality = 0;
  std::size_t retained = 0;
};

struct EligibilityRule {
  int min_age = 12;
  int max_age = 19;
};

/// Keeps participants aged [min_age, max_age] inclusive, not breastfeeding,
/// with a reliable recall. Criteria are applied in that order and each
/// participant is counted against the first criterion it fails. Recalls and
/// truths of removed participants are dropped too.
Cohort filter_eligible(const Cohort& cohort, FilterCounts* counts = nullptr, EligibilityRule rule = {});

}  // namespace nutrieval::recall
