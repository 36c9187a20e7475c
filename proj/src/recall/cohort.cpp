#include "nutrieval/recall/cohort.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "nutrieval/csv.hpp"
#include "nutrieval/error.hpp"
#include "nutrieval/recall/food_string.hpp"

namespace nutrieval::recall {

const DietaryRecall* Cohort::find_recall(const std::string& participant_id, int day) const {
  auto it = recalls.find({participant_id, day});
  return it == recalls.end() ? nullptr : &it->second;
}

const GroundTruth* Cohort::find_truth(const std::string& participant_id) const {
  auto it = truths.find(participant_id);
  return it == truths.end() ? nullptr : &it->second;
}

bool Cohort::contains(const std::string& participant_id) const {
  return std::any_of(participants.begin(), participants.end(),
                     [&](const ParticipantRecord& p) { return p.participant_id == participant_id; });
}

std::vector<std::string> Cohort::evaluable_ids(int day) const {
  std::vector<std::string> ids;
  for (const auto& p : participants) {
    if (find_recall(p.participant_id, day) && find_truth(p.participant_id)) ids.push_back(p.participant_id);
  }
  return ids;
}

namespace {

std::vector<ParticipantRecord> load_participants(const csv::Table& t) {
  t.require_header({"participant_id", "age_years", "sex", "breastfeeding", "recall_quality"});
  const auto c_id = t.column("participant_id");
  const auto c_age = t.column("age_years");
  const auto c_sex = t.column("sex");
  const auto c_bf = t.column("breastfeeding");
  const auto c_q = t.column("recall_quality");

  std::vector<ParticipantRecord> out;
  std::set<std::string> seen;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    ParticipantRecord p;
    p.participant_id = t.text(r, c_id);
    if (p.participant_id.empty()) throw DataError(t.source(), r + 1, "participant_id", "empty id");
    if (!seen.insert(p.participant_id).second) {
      throw DataError(t.source(), r + 1, "participant_id", "duplicate id \"" + p.participant_id + "\"");
    }
    const auto age = t.integer(r, c_age);
    if (age < 0 || age > 150) throw DataError(t.source(), r + 1, "age_years", "age out of range");
    p.age_years = static_cast<int>(age);

    const auto& sex = t.text(r, c_sex);
    if (sex == "M") {
      p.sex = Sex::kMale;
    } else if (sex == "F") {
      p.sex = Sex::kFemale;
    } else if (sex == "U") {
      p.sex = Sex::kUnknown;
    } else {
      throw DataError(t.source(), r + 1, "sex", "expected M, F or U, found \"" + sex + "\"");
    }

    const auto& bf = t.text(r, c_bf);
    if (bf != "0" && bf != "1") {
      throw DataError(t.source(), r + 1, "breastfeeding", "expected 0 or 1, found \"" + bf + "\"");
    }
    p.breastfeeding = bf == "1";

    const auto& q = t.text(r, c_q);
    if (q == "reliable") {
      p.recall_quality = RecallQuality::kReliable;
    } else if (q == "unreliable") {
      p.recall_quality = RecallQuality::kUnreliable;
    } else {
      throw DataError(t.source(), r + 1, "recall_quality", "expected reliable or unreliable, found \"" + q + "\"");
    }
    out.push_back(std::move(p));
  }
  return out;
}

void load_recalls(const csv::Table& t, Cohort& cohort, const std::set<std::string>& ids) {
  t.require_header({"participant_id", "day", "seq", "food_code", "descriptor", "grams"});
  const auto c_id = t.column("participant_id");
  const auto c_day = t.column("day");
  const auto c_seq = t.column("seq");
  const auto c_code = t.column("food_code");
  const auto c_desc = t.column("descriptor");
  const auto c_grams = t.column("grams");

  struct Row {
    long long seq;
    std::size_t file_row;
    FoodItem item;
  };
  std::map<std::pair<std::string, int>, std::vector<Row>> grouped;

  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& id = t.text(r, c_id);
    if (!ids.count(id)) {
      throw DataError(t.source(), r + 1, "participant_id", "references unknown participant \"" + id + "\"");
    }
    const auto day = t.integer(r, c_day);
    if (day != 1 && day != 2) throw DataError(t.source(), r + 1, "day", "day must be 1 or 2");
    const auto seq = t.integer(r, c_seq);

    FoodItem item;
    item.food_code = t.text(r, c_code);
    item.descriptor = t.text(r, c_desc);
    try {
      validate_descriptor(item.descriptor);
    } catch (const GrammarError& e) {
      throw DataError(t.source(), r + 1, "descriptor", e.what());
    }
    if (std::any_of(item.descriptor.begin(), item.descriptor.end(),
                    [](unsigned char c) { return std::islower(c); })) {
      throw DataError(t.source(), r + 1, "descriptor", "descriptor must be uppercase");
    }
    item.grams = t.number(r, c_grams);
    if (item.grams <= 0.0) throw DataError(t.source(), r + 1, "grams", "grams must be positive");

    grouped[{id, static_cast<int>(day)}].push_back({seq, r + 1, std::move(item)});
  }

  for (auto& [key, rows] : grouped) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.seq < b.seq; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].seq == rows[i - 1].seq) {
        throw DataError(t.source(), rows[i].file_row, "seq",
                        "duplicate seq " + std::to_string(rows[i].seq) + " within recall of \"" + key.first + "\"");
      }
    }
    DietaryRecall recall{key.first, key.second, {}};
    recall.items.reserve(rows.size());
    for (auto& row : rows) recall.items.push_back(std::move(row.item));
    cohort.recalls.emplace(key, std::move(recall));
  }
  cohort.recall_item_rows = t.rows();
}

void load_truths(const csv::Table& t, Cohort& cohort, const std::set<std::string>* ids) {
  t.require_header({"participant_id", "kcal", "protein_g", "carb_g", "sugar_g", "fiber_g", "fat_g"});
  const auto c_id = t.column("participant_id");
  static constexpr std::array<std::string_view, kNutrientCount> kCols = {"kcal",    "protein_g", "carb_g",
                                                                         "sugar_g", "fiber_g",   "fat_g"};
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& id = t.text(r, c_id);
    if (id.empty()) throw DataError(t.source(), r + 1, "participant_id", "empty id");
    if (ids && !ids->count(id)) {
      throw DataError(t.source(), r + 1, "participant_id", "references unknown participant \"" + id + "\"");
    }
    GroundTruth truth{id, {}};
    for (std::size_t k = 0; k < kNutrientCount; ++k) {
      const double v = t.number(r, t.column(kCols[k]));
      if (v < 0.0) throw DataError(t.source(), r + 1, std::string(kCols[k]), "value must be non-negative");
      truth.values.values[k] = v;
    }
    if (!cohort.truths.emplace(id, std::move(truth)).second) {
      throw DataError(t.source(), r + 1, "participant_id", "duplicate ground truth for \"" + id + "\"");
    }
  }
}

}  // namespace

Cohort load_cohort(const std::filesystem::path& participants_path, const std::filesystem::path& recalls_path,
                   const std::filesystem::path& truth_path) {
  // Open everything up front so a missing file is reported before any parsing.
  for (const auto* p : {&participants_path, &recalls_path, &truth_path}) {
    if (!std::filesystem::exists(*p)) throw DataError(p->string(), 0, "", "file not found");
  }
  Cohort cohort;
  cohort.participants = load_participants(csv::Table::read(participants_path));
  std::set<std::string> ids;
  for (const auto& p : cohort.participants) ids.insert(p.participant_id);
  load_recalls(csv::Table::read(recalls_path), cohort, ids);
  load_truths(csv::Table::read(truth_path), cohort, &ids);
  return cohort;
}

std::map<std::string, NutrientVector> load_ground_truth(const std::filesystem::path& truth_path) {
  if (!std::filesystem::exists(truth_path)) throw DataError(truth_path.string(), 0, "", "file not found");
  Cohort scratch;
  load_truths(csv::Table::read(truth_path), scratch, nullptr);
  std::map<std::string, NutrientVector> out;
  for (auto& [id, truth] : scratch.truths) out.emplace(id, truth.values);
  return out;
}

Cohort filter_eligible(const Cohort& cohort, FilterCounts* counts, EligibilityRule rule) {
  FilterCounts c;
  c.input = cohort.participants.size();
  Cohort out;
  std::set<std::string> kept;
  for (const auto& p : cohort.participants) {
    if (p.age_years < rule.min_age || p.age_years > rule.max_age) {
      ++c.removed_age;
    } else if (p.breastfeeding) {
      ++c.removed_breastfeeding;
    } else if (p.recall_quality != RecallQuality::kReliable) {
      ++c.removed_quality;
    } else {
      out.participants.push_back(p);
      kept.insert(p.participant_id);
    }
  }
  for (const auto& [key, recall] : cohort.recalls) {
    if (kept.count(key.first)) {
      out.recalls.emplace(key, recall);
      out.recall_item_rows += recall.items.size();
    }
  }
  for (const auto& [id, truth] : cohort.truths) {
    if (kept.count(id)) out.truths.emplace(id, truth);
  }
  c.retained = out.participants.size();
  if (counts) *counts = c;
  return out;
}

}  // namespace nutrieval::recall
