#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nutrieval/recall/cohort.hpp"

namespace nutrieval::recall {

/// One `DESCRIPTOR (grams)` entry of a food string.
struct FoodEntry {
  std::string descriptor;
  double grams = 0.0;

  friend bool operator==(const FoodEntry&, const FoodEntry&) = default;
};

/// Throws GrammarError if `descriptor` cannot appear in a food string: it must
/// be non-empty after trimming, contain no ';' or line break, and any
/// parentheses must be balanced (the grams group is always the last one).
void validate_descriptor(std::string_view descriptor);

/// "PORK CHOP, BREADED, FRIED, LEAN ONLY (22); TAFFY (15.6)". No terminal period.
std::string render_food_string(const DietaryRecall& recall);
std::string render_food_string(const std::vector<FoodEntry>& entries);

/// Inverse of render_food_string. Items are separated by ';', each ends with
/// a parenthesized non-negative decimal. Errors carry the character offset.
std::vector<FoodEntry> parse_food_string(std::string_view text);

}  // namespace nutrieval::recall
