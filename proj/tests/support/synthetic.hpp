#pragma once

// Seeded synthetic cohorts written in the canonical CSV layout.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "nutrieval/nutrients.hpp"
#include "nutrieval/recall/food_string.hpp"

namespace nutrieval::testing {

/// A fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

struct SyntheticOptions {
  std::size_t n = 100;
  std::uint64_t seed = 7;
  /// Extra participants that fail one eligibility rule each (cycled:
  /// age 11, age 20, breastfeeding, unreliable).
  std::size_t n_ineligible = 0;
  /// Truth = table-derived intake (rounded to 2 dp) instead of draws with
  /// the pooled-cohort moments.
  bool truth_from_table = false;
};

struct SyntheticCohort {
  std::filesystem::path participants, recalls, truth, table;
  /// Eligible ids in file order.
  std::vector<std::string> ids;
  std::map<std::string, NutrientVector> truths;
  std::map<std::string, std::vector<recall::FoodEntry>> items;
  std::map<std::string, NutrientVector> table_rows;
};

/// Writes participants.csv, recalls.csv (day 2), truth.csv and
/// nutrient_table.csv into `dir`.
SyntheticCohort write_synthetic_cohort(const std::filesystem::path& dir, const SyntheticOptions& options);

/// Pooled-cohort means and SDs per nutrient (kcal, protein, carb, sugar, fiber, fat).
inline constexpr double kPooledMean[6] = {1957, 73.77, 251.80, 114.38, 13.56, 74.34};
inline constexpr double kPooledSd[6] = {946.29, 40.99, 127.48, 73.04, 8.49, 43.46};

/// Round half away from zero to 2 decimals.
double round2(double v);

}  // namespace nutrieval::testing
