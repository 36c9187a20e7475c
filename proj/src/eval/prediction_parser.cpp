#include "nutrieval/eval/prediction_parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <vector>

#include "nutrieval/error.hpp"

namespace nutrieval::eval {

namespace {

constexpr std::array<std::string_view, kInvalidReasonCount> kReasonNames = {
    "wrong_field_count", "non_numeric_field", "extra_text", "negative_value", "empty_reply"};

enum class FieldKind { kNumber, kNegative, kGarbled, kWordsOnly, kTextWithDigits };

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// digits[.digits]
bool is_plain_decimal(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size() && is_digit(s[i])) ++i;
  if (i == 0) return false;
  if (i == s.size()) return true;
  if (s[i] != '.') return false;
  const std::size_t frac = ++i;
  while (i < s.size() && is_digit(s[i])) ++i;
  return i == s.size() && i > frac;
}

FieldKind classify(std::string_view field) {
  if (is_plain_decimal(field)) return FieldKind::kNumber;
  if (field.size() > 1 && field.front() == '-' && is_plain_decimal(field.substr(1))) return FieldKind::kNegative;
  bool numeric_chars_only = true;
  bool has_digit = false;
  for (char c : field) {
    has_digit |= is_digit(c);
    // Separators other than ';' make a field garbled, not textual.
    if (!is_digit(c) && c != '.' && c != '-' && c != '+' && c != ',' && !is_space(c)) numeric_chars_only = false;
  }
  if (numeric_chars_only) return FieldKind::kGarbled;
  return has_digit ? FieldKind::kTextWithDigits : FieldKind::kWordsOnly;
}

}  // namespace

std::string_view to_string(InvalidReason r) { return kReasonNames[static_cast<std::size_t>(r)]; }

InvalidReason invalid_reason_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kReasonNames.size(); ++i) {
    if (kReasonNames[i] == name) return static_cast<InvalidReason>(i);
  }
  throw DataError("unknown exclusion reason \"" + std::string(name) + "\"");
}

ParsedPrediction parse_prediction(std::string_view raw_text, const ParseOptions& options) {
  ParsedPrediction out;
  auto text = trim(raw_text);
  if (text.empty()) {
    out.reason = InvalidReason::kEmptyReply;
    return out;
  }
  if (options.allow_trailing_period && text.back() == '.') text = trim(text.substr(0, text.size() - 1));

  std::vector<FieldKind> kinds;
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  while (true) {
    const auto end = text.find(';', pos);
    const auto field = trim(text.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos));
    fields.push_back(field);
    kinds.push_back(classify(field));
    if (end == std::string_view::npos) break;
    pos = end + 1;
  }

  auto any = [&](FieldKind k) { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); };

  if (fields.size() != kNutrientCount) {
    out.reason = (any(FieldKind::kTextWithDigits) || any(FieldKind::kWordsOnly)) ? InvalidReason::kExtraText
                                                                                 : InvalidReason::kWrongFieldCount;
    return out;
  }
  if (any(FieldKind::kTextWithDigits)) {
    out.reason = InvalidReason::kExtraText;
    return out;
  }
  if (any(FieldKind::kWordsOnly) || any(FieldKind::kGarbled)) {
    out.reason = InvalidReason::kNonNumericField;
    return out;
  }
  if (any(FieldKind::kNegative)) {
    out.reason = InvalidReason::kNegativeValue;
    return out;
  }

  NutrientVector v;
  for (std::size_t k = 0; k < kNutrientCount; ++k) {
    const auto f = fields[k];
    auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v.values[k]);
    if (ec != std::errc() || !std::isfinite(v.values[k])) {
      out.reason = InvalidReason::kNonNumericField;
      return out;
    }
  }
  out.values = v;
  return out;
}

}  // namespace nutrieval::eval
