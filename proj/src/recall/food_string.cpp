#include "nutrieval/recall/food_string.hpp"

#include <charconv>
#include <cmath>

#include "nutrieval/error.hpp"

namespace nutrieval::recall {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t'; }

}  // namespace

void validate_descriptor(std::string_view descriptor) {
  std::size_t begin = 0;
  while (begin < descriptor.size() && is_space(descriptor[begin])) ++begin;
  if (begin == descriptor.size()) throw GrammarError(0, "empty descriptor");

  int depth = 0;
  for (std::size_t i = 0; i < descriptor.size(); ++i) {
    const char c = descriptor[i];
    if (c == ';') throw GrammarError(i, "descriptor contains reserved ';'");
    if (c == '\n' || c == '\r') throw GrammarError(i, "descriptor contains a line break");
    if (c == '(') ++depth;
    if (c == ')' && --depth < 0) throw GrammarError(i, "unbalanced ')' in descriptor");
  }
  if (depth != 0) throw GrammarError(descriptor.size(), "unbalanced '(' in descriptor");
}

std::string render_food_string(const std::vector<FoodEntry>& entries) {
  std::string out;
  for (const auto& e : entries) {
    validate_descriptor(e.descriptor);
    if (!std::isfinite(e.grams) || e.grams <= 0.0) {
      throw GrammarError(out.size(), "grams must be finite and positive for \"" + e.descriptor + "\"");
    }
    if (!out.empty()) out += "; ";
    out += e.descriptor;
    out += " (";
    out += format_decimal(e.grams);
    out += ')';
  }
  return out;
}

std::string render_food_string(const DietaryRecall& recall) {
  std::vector<FoodEntry> entries;
  entries.reserve(recall.items.size());
  for (const auto& item : recall.items) entries.push_back({item.descriptor, item.grams});
  return render_food_string(entries);
}

std::vector<FoodEntry> parse_food_string(std::string_view text) {
  std::vector<FoodEntry> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t item_begin = pos;
    std::size_t item_end = text.find(';', pos);
    if (item_end == std::string_view::npos) item_end = text.size();

    std::size_t b = item_begin;
    std::size_t e = item_end;
    while (b < e && is_space(text[b])) ++b;
    while (e > b && is_space(text[e - 1])) --e;
    if (b == e) throw GrammarError(b, "empty item");
    if (text[e - 1] != ')') throw GrammarError(e, "expected ')' closing the grams amount");

    // Walk back to the '(' matching the final ')'.
    int depth = 0;
    std::size_t open = std::string_view::npos;
    for (std::size_t i = e; i-- > b;) {
      if (text[i] == ')') ++depth;
      if (text[i] == '(' && --depth == 0) {
        open = i;
        break;
      }
    }
    if (open == std::string_view::npos) throw GrammarError(e - 1, "unbalanced ')'");

    std::size_t desc_end = open;
    while (desc_end > b && is_space(text[desc_end - 1])) --desc_end;
    if (desc_end == b) throw GrammarError(b, "empty descriptor");
    const auto descriptor = text.substr(b, desc_end - b);
    try {
      validate_descriptor(descriptor);
    } catch (const GrammarError& err) {
      throw GrammarError(b + err.offset(), err.what());
    }

    const auto amount = text.substr(open + 1, e - 1 - (open + 1));
    double grams = 0.0;
    auto [ptr, ec] = std::from_chars(amount.data(), amount.data() + amount.size(), grams);
    if (amount.empty() || ec != std::errc() || ptr != amount.data() + amount.size() || !std::isfinite(grams) ||
        grams < 0.0 || amount.front() == '-' || amount.front() == '+') {
      throw GrammarError(open + 1, "grams amount is not a non-negative decimal: \"" + std::string(amount) + "\"");
    }
    out.push_back({std::string(descriptor), grams});

    if (item_end == text.size()) break;
    pos = item_end + 1;
  }
  return out;
}

}  // namespace nutrieval::recall
