#include "nutrieval/inference/nutrient_table.hpp"

#include <algorithm>
#include <cctype>
#include <vector>

#include "nutrieval/csv.hpp"
#include "nutrieval/error.hpp"

namespace nutrieval::inference {

void NutrientTable::add(const std::string& descriptor, const NutrientVector& per_100g) {
  recall::validate_descriptor(descriptor);
  if (std::any_of(descriptor.begin(), descriptor.end(), [](unsigned char c) { return std::islower(c); })) {
    throw DataError("nutrient table: descriptor must be uppercase: \"" + descriptor + "\"");
  }
  if (!per_100g.valid()) throw DataError("nutrient table: negative or non-finite values for \"" + descriptor + "\"");
  rows_[descriptor] = per_100g;
}

const NutrientVector* NutrientTable::find(const std::string& descriptor) const {
  auto it = rows_.find(descriptor);
  return it == rows_.end() ? nullptr : &it->second;
}

NutrientTable NutrientTable::load(const std::filesystem::path& path) {
  const auto t = csv::Table::read(path);
  static constexpr std::array<std::string_view, kNutrientCount> kCols = {
      "kcal_100g", "protein_100g", "carb_100g", "sugar_100g", "fiber_100g", "fat_100g"};
  t.require_header({"descriptor", kCols[0], kCols[1], kCols[2], kCols[3], kCols[4], kCols[5]});
  const auto c_desc = t.column("descriptor");

  NutrientTable table;
  for (std::size_t r = 0; r < t.rows(); ++r) {
    const auto& desc = t.text(r, c_desc);
    NutrientVector v;
    for (std::size_t k = 0; k < kNutrientCount; ++k) v.values[k] = t.number(r, t.column(kCols[k]));
    if (table.find(desc)) throw DataError(t.source(), r + 1, "descriptor", "duplicate descriptor \"" + desc + "\"");
    try {
      table.add(desc, v);
    } catch (const DataError& e) {
      throw DataError(t.source(), r + 1, "", e.what());
    }
  }
  return table;
}

NutrientVector oracle_estimate(std::span<const recall::FoodEntry> items, const NutrientTable& table) {
  // Accumulate in a canonical order so any permutation of `items` gives the
  // bit-identical total.
  std::vector<const recall::FoodEntry*> order;
  order.reserve(items.size());
  for (const auto& item : items) {
    if (!table.find(item.descriptor)) throw DataError("nutrient table has no entry for \"" + item.descriptor + "\"");
    order.push_back(&item);
  }
  std::sort(order.begin(), order.end(), [](const recall::FoodEntry* a, const recall::FoodEntry* b) {
    return a->descriptor != b->descriptor ? a->descriptor < b->descriptor : a->grams < b->grams;
  });

  NutrientVector total;
  for (const auto* item : order) {
    const auto* row = table.find(item->descriptor);
    const double scale = item->grams / 100.0;
    for (std::size_t k = 0; k < kNutrientCount; ++k) total.values[k] += row->values[k] * scale;
  }
  return total;
}

}  // namespace nutrieval::inference
