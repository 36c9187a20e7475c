#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "nutrieval/nutrients.hpp"

namespace nutrieval::eval {

enum class InvalidReason { kWrongFieldCount, kNonNumericField, kExtraText, kNegativeValue, kEmptyReply };

inline constexpr std::size_t kInvalidReasonCount = 5;

std::string_view to_string(InvalidReason r);
InvalidReason invalid_reason_from_string(std::string_view name);

struct ParseOptions {
  /// Accept a single trailing '.' after the sixth value.
  bool allow_trailing_period = true;
};

/// Outcome of validating one model reply: six values, or why not.
struct ParsedPrediction {
  std::string participant_id;
  std::optional<NutrientVector> values;
  InvalidReason reason = InvalidReason::kEmptyReply;

  bool valid() const { return values.has_value(); }
};

/// Accepts exactly six semicolon-separated non-negative decimals
/// (`digits[.digits]`), surrounding whitespace, and optionally one trailing
/// period. Never throws.
///
/// Rejections, most specific first:
///  - empty_reply: nothing but whitespace;
///  - extra_text: any field carries characters other than a number, e.g.
///    labels, units, prose or prefixes like "Answer:";
///  - wrong_field_count: numeric-looking content but not six fields;
///  - non_numeric_field: an empty or garbled field ("", "N/A", "1.2.3");
///  - negative_value: a field that is a well-formed negative number.
ParsedPrediction parse_prediction(std::string_view raw_text, const ParseOptions& options = {});

}  // namespace nutrieval::eval
