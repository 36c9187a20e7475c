#include "nutrieval/nutrients.hpp"

#include <cmath>
#include <cstdio>

#include "nutrieval/error.hpp"

namespace nutrieval {

DataError::DataError(std::string file, std::size_t row, std::string column, const std::string& what)
    : Error(file + (row ? ": row " + std::to_string(row) : std::string()) +
            (column.empty() ? std::string() : ", column " + column) + ": " + what),
      file_(std::move(file)),
      row_(row),
      column_(std::move(column)) {}

GrammarError::GrammarError(std::size_t offset, const std::string& what)
    : DataError("offset " + std::to_string(offset) + ": " + what), offset_(offset) {}

namespace {

struct NutrientInfo {
  std::string_view key;
  std::string_view code;
  std::string_view unit;
  std::string_view label;
};

constexpr std::array<NutrientInfo, kNutrientCount> kInfo = {{
    {"kcal", "DRxIKCAL", "kcal", "Total energy"},
    {"protein", "DRxIPROT", "g", "Total protein"},
    {"carbohydrate", "DRxICARB", "g", "Total carbohydrates"},
    {"sugars", "DRxISUGR", "g", "Total sugars"},
    {"fiber", "DRxIFIBE", "g", "Total dietary fiber"},
    {"fat", "DRxITFAT", "g", "Total fat"},
}};

const NutrientInfo& info(Nutrient n) { return kInfo[static_cast<std::size_t>(n)]; }

}  // namespace

std::string_view nutrient_key(Nutrient n) { return info(n).key; }
std::string_view nutrient_code(Nutrient n) { return info(n).code; }
std::string_view nutrient_unit(Nutrient n) { return info(n).unit; }
std::string_view nutrient_label(Nutrient n) { return info(n).label; }

bool NutrientVector::valid() const {
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) return false;
  }
  return true;
}

std::string format_decimal(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", value);
  std::string s(buf);
  if (auto dot = s.find('.'); dot != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

}  // namespace nutrieval
