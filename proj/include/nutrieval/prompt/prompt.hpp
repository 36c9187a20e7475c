#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nutrieval/nutrients.hpp"

namespace nutrieval::prompt {

/// verbatim reproduces the published prompt byte for byte, typos included.
/// cleaned strips HTML artifact tags and normalizes the example labels.
enum class Fidelity { kVerbatim, kCleaned };

Fidelity fidelity_from_string(std::string_view name);
std::string_view to_string(Fidelity f);

struct FewShotExample {
  std::string input_string;
  NutrientVector expected;
  /// Label as printed before the expected values ("Expected Output").
  std::string label;
};

/// A chat prompt split into a system template, the calibration examples and
/// a user template.
///
/// The fixture file holds three sections introduced by marker lines
/// `[[SYSTEM]]`, `[[EXAMPLES]]` and `[[USER]]`. The system section contains
/// the `{examples}` marker where the examples section is spliced in; the user
/// section contains `{diet}`.
struct PromptTemplate {
  std::string system_text;
  std::string examples_text;
  std::string user_text;
  std::vector<FewShotExample> examples;
  Fidelity fidelity = Fidelity::kVerbatim;
  /// SHA-256 of the fixture bytes this template was parsed from.
  std::string fixture_sha256;

  /// The system message with examples spliced in, per `fidelity`.
  std::string system_message() const;
};

struct PromptBundle {
  std::string participant_id;
  std::string system_message;
  std::string user_message;
  /// The food string substituted for `{diet}`; lets offline backends work
  /// from the same bundle a remote model sees.
  std::string food_string;
};

inline constexpr std::string_view kExamplesMarker = "{examples}";
inline constexpr std::string_view kDietPlaceholder = "{diet}";

/// Reference SHA-256 of the shipped ten-shot fixture (data/ten_shot_prompt.txt).
inline constexpr std::string_view kFixtureSha256 =
    "6ee3fbc7200ba665cc18f85fe54c28f2fb46bbf76f1a9d36e52e9d8011d7396b";

/// The shipped fixture, compiled into the library.
std::string_view embedded_fixture();

/// Parses fixture text. Throws ConfigError if a section or placeholder is
/// missing or an example block is malformed.
PromptTemplate parse_fixture(std::string_view text, Fidelity fidelity = Fidelity::kVerbatim);
PromptTemplate load_fixture(const std::filesystem::path& path, Fidelity fidelity = Fidelity::kVerbatim);
PromptTemplate default_template(Fidelity fidelity = Fidelity::kVerbatim);

/// Substitutes `food_string` for `{diet}`. Deterministic.
PromptBundle render_prompt(const PromptTemplate& tmpl, std::string_view food_string,
                           std::string participant_id = {});

/// "1630; 107.97; 233.28; 79.83; 27.7; 33.68"
std::string format_target(const NutrientVector& values);

/// Removes `<p>`, `<ol ...>`, `<ul ...>`, `<li>` and their closing tags.
std::string strip_html_tags(std::string_view text);

}  // namespace nutrieval::prompt
