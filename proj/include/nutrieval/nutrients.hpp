#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace nutrieval {

/// The six predicted outcomes, in the order they are serialized everywhere.
enum class Nutrient : std::size_t { kEnergy = 0, kProtein, kCarbohydrate, kSugars, kFiber, kFat };

inline constexpr std::size_t kNutrientCount = 6;

inline constexpr std::array<Nutrient, kNutrientCount> kAllNutrients = {
    Nutrient::kEnergy, Nutrient::kProtein, Nutrient::kCarbohydrate,
    Nutrient::kSugars, Nutrient::kFiber,   Nutrient::kFat};

/// Short name used in file names and JSON keys ("kcal", "protein", ...).
std::string_view nutrient_key(Nutrient n);
/// Column code used in report tables (DRxIKCAL, ...).
std::string_view nutrient_code(Nutrient n);
/// "kcal" or "g".
std::string_view nutrient_unit(Nutrient n);
/// Human-readable label, e.g. "Total energy".
std::string_view nutrient_label(Nutrient n);

/// Energy plus five macronutrients for one participant-day.
struct NutrientVector {
  std::array<double, kNutrientCount> values{};

  double& operator[](Nutrient n) { return values[static_cast<std::size_t>(n)]; }
  double operator[](Nutrient n) const { return values[static_cast<std::size_t>(n)]; }

  double kcal() const { return (*this)[Nutrient::kEnergy]; }
  double protein_g() const { return (*this)[Nutrient::kProtein]; }
  double carb_g() const { return (*this)[Nutrient::kCarbohydrate]; }
  double sugar_g() const { return (*this)[Nutrient::kSugars]; }
  double fiber_g() const { return (*this)[Nutrient::kFiber]; }
  double fat_g() const { return (*this)[Nutrient::kFat]; }

  /// All six fields finite and non-negative.
  bool valid() const;

  friend bool operator==(const NutrientVector&, const NutrientVector&) = default;
};

/// Minimal decimal form with at most two decimals: 22, 15.6, 314.68.
/// Rounding is that of printf("%.2f"); negative zero prints as "0".
std::string format_decimal(double value);

}  // namespace nutrieval
