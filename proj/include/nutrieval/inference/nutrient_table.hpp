#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>

#include "nutrieval/nutrients.hpp"
#include "nutrieval/recall/food_string.hpp"

namespace nutrieval::inference {

/// Per-100 g nutrient composition keyed by food descriptor.
class NutrientTable {
 public:
  /// Throws DataError if the descriptor is not grammar-legal and uppercase,
  /// or the vector is not finite and non-negative.
  void add(const std::string& descriptor, const NutrientVector& per_100g);

  const NutrientVector* find(const std::string& descriptor) const;
  std::size_t size() const { return rows_.size(); }
  const std::map<std::string, NutrientVector>& rows() const { return rows_; }

  /// CSV header: descriptor,kcal_100g,protein_100g,carb_100g,sugar_100g,fiber_100g,fat_100g
  static NutrientTable load(const std::filesystem::path& path);

 private:
  std::map<std::string, NutrientVector> rows_;
};

/// Sum over items of per-100 g vector x grams / 100, unrounded.
/// Throws DataError naming the first descriptor missing from the table.
NutrientVector oracle_estimate(std::span<const recall::FoodEntry> items, const NutrientTable& table);

}  // namespace nutrieval::inference
