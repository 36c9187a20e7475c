#include "nutrieval/prompt/prompt.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <regex>
#include <sstream>

#include "nutrieval/checksum.hpp"
#include "nutrieval/error.hpp"

namespace nutrieval::prompt {

namespace detail {
extern const std::string_view kEmbeddedFixture;
}

namespace {

constexpr std::string_view kSystemHeader = "[[SYSTEM]]\n";
constexpr std::string_view kExamplesHeader = "\n[[EXAMPLES]]\n";
constexpr std::string_view kUserHeader = "\n[[USER]]\n";
constexpr std::string_view kPatientInput = "Patient Input:";
constexpr std::string_view kRecallPrefix = "24-hour dietary recall: ";

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + needle.size())) ++n;
  return n;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Whitespace runs that contain a line break become one space.
std::string join_broken_lines(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size();) {
    if (std::isspace(static_cast<unsigned char>(s[i]))) {
      std::size_t j = i;
      bool newline = false;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) newline |= s[j++] == '\n';
      out.append(newline ? std::string(" ") : std::string(s.substr(i, j - i)));
      i = j;
    } else {
      out.push_back(s[i++]);
    }
  }
  return out;
}

NutrientVector parse_values(std::string_view text, std::size_t example_no) {
  NutrientVector v;
  std::size_t k = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(';', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto field = trim(text.substr(pos, end - pos));
    double x = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
    if (k >= kNutrientCount || ec != std::errc() || ptr != field.data() + field.size() || x < 0.0) {
      throw ConfigError("prompt fixture: example " + std::to_string(example_no) + " has malformed expected output");
    }
    v.values[k++] = x;
    pos = end + 1;
  }
  if (k != kNutrientCount) {
    throw ConfigError("prompt fixture: example " + std::to_string(example_no) + " needs six expected values");
  }
  return v;
}

std::vector<FewShotExample> parse_examples(std::string_view text) {
  std::vector<FewShotExample> out;
  std::size_t pos = text.find(kPatientInput);
  while (pos != std::string_view::npos) {
    const std::size_t next = text.find(kPatientInput, pos + kPatientInput.size());
    auto block = trim(text.substr(pos + kPatientInput.size(),
                                  (next == std::string_view::npos ? text.size() : next) - pos - kPatientInput.size()));
    const std::size_t no = out.size() + 1;
    if (block.substr(0, kRecallPrefix.size()) != kRecallPrefix) {
      throw ConfigError("prompt fixture: example " + std::to_string(no) + " lacks \"24-hour dietary recall:\"");
    }
    const auto last_break = block.rfind('\n');
    if (last_break == std::string_view::npos) {
      throw ConfigError("prompt fixture: example " + std::to_string(no) + " lacks an expected-output line");
    }
    const auto outcome_line = trim(block.substr(last_break + 1));
    const auto colon = outcome_line.find(": ");
    if (colon == std::string_view::npos) {
      throw ConfigError("prompt fixture: example " + std::to_string(no) + " expected-output line has no label");
    }
    FewShotExample ex;
    ex.input_string = join_broken_lines(trim(block.substr(kRecallPrefix.size(), last_break - kRecallPrefix.size())));
    ex.label = std::string(outcome_line.substr(0, colon));
    ex.expected = parse_values(outcome_line.substr(colon + 2), no);
    out.push_back(std::move(ex));
    pos = next;
  }
  return out;
}

std::string replace_once(std::string_view text, std::string_view marker, std::string_view value) {
  const auto at = text.find(marker);
  std::string out;
  out.reserve(text.size() + value.size());
  out.append(text.substr(0, at));
  out.append(value);
  out.append(text.substr(at + marker.size()));
  return out;
}

}  // namespace

Fidelity fidelity_from_string(std::string_view name) {
  if (name == "verbatim") return Fidelity::kVerbatim;
  if (name == "cleaned") return Fidelity::kCleaned;
  throw ConfigError("prompt fidelity must be verbatim or cleaned, got \"" + std::string(name) + "\"");
}

std::string_view to_string(Fidelity f) { return f == Fidelity::kVerbatim ? "verbatim" : "cleaned"; }

std::string strip_html_tags(std::string_view text) {
  static const std::regex kTag(R"(</?(p|ol|ul|li)(\s[^>]*)?>)");
  return std::regex_replace(std::string(text), kTag, "");
}

std::string PromptTemplate::system_message() const {
  if (fidelity == Fidelity::kVerbatim) return replace_once(system_text, kExamplesMarker, examples_text);

  std::string region;
  for (const auto& ex : examples) {
    if (!region.empty()) region += "\n\n";
    region += std::string(kPatientInput) + "\n\n" + std::string(kRecallPrefix) + ex.input_string +
              "\n\nExpected Output: " + format_target(ex.expected);
  }
  return replace_once(strip_html_tags(system_text), kExamplesMarker, region);
}

PromptTemplate parse_fixture(std::string_view text, Fidelity fidelity) {
  if (text.substr(0, kSystemHeader.size()) != kSystemHeader) {
    throw ConfigError("prompt fixture: must start with a [[SYSTEM]] line");
  }
  const auto ex_at = text.find(kExamplesHeader);
  const auto user_at = text.find(kUserHeader);
  if (ex_at == std::string_view::npos || user_at == std::string_view::npos || user_at < ex_at) {
    throw ConfigError("prompt fixture: needs [[SYSTEM]], [[EXAMPLES]] and [[USER]] sections in that order");
  }

  PromptTemplate t;
  t.fidelity = fidelity;
  t.fixture_sha256 = sha256_hex(text);
  t.system_text = std::string(text.substr(kSystemHeader.size(), ex_at - kSystemHeader.size()));
  t.examples_text = std::string(text.substr(ex_at + kExamplesHeader.size(), user_at - ex_at - kExamplesHeader.size()));
  auto user = text.substr(user_at + kUserHeader.size());
  if (!user.empty() && user.back() == '\n') user.remove_suffix(1);
  t.user_text = std::string(user);

  if (count(t.system_text, kExamplesMarker) != 1) {
    throw ConfigError("prompt fixture: system section must contain {examples} exactly once");
  }
  if (count(t.user_text, kDietPlaceholder) != 1) {
    throw ConfigError("prompt fixture: user section must contain {diet} exactly once");
  }
  t.examples = parse_examples(t.examples_text);
  return t;
}

PromptTemplate load_fixture(const std::filesystem::path& path, Fidelity fidelity) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open prompt fixture " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_fixture(ss.str(), fidelity);
}

std::string_view embedded_fixture() { return detail::kEmbeddedFixture; }

PromptTemplate default_template(Fidelity fidelity) { return parse_fixture(embedded_fixture(), fidelity); }

PromptBundle render_prompt(const PromptTemplate& tmpl, std::string_view food_string, std::string participant_id) {
  if (count(tmpl.user_text, kDietPlaceholder) != 1) {
    throw ConfigError("prompt template: user text must contain {diet} exactly once");
  }
  if (count(tmpl.system_text, kExamplesMarker) != 1) {
    throw ConfigError("prompt template: system text must contain {examples} exactly once");
  }
  if (trim(food_string).empty()) throw DataError("prompt: empty food string for participant " + participant_id);
  return PromptBundle{std::move(participant_id), tmpl.system_message(),
                      replace_once(tmpl.user_text, kDietPlaceholder, food_string), std::string(food_string)};
}

std::string format_target(const NutrientVector& values) {
  std::string out;
  for (std::size_t k = 0; k < kNutrientCount; ++k) {
    if (k) out += "; ";
    out += format_decimal(values.values[k]);
  }
  return out;
}

}  // namespace nutrieval::prompt
