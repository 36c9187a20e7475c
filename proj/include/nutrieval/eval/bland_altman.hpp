#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "nutrieval/eval/metrics.hpp"

namespace nutrieval::eval {

inline constexpr double kLimitsMultiplier = 1.96;

struct AgreementPoint {
  double average = 0.0;     // (prediction + truth) / 2
  double difference = 0.0;  // prediction - truth
};

struct NutrientAgreement {
  double mean_diff = 0.0;
  double sd_diff = 0.0;  // sample SD, n - 1
  double loa_low = 0.0;
  double loa_high = 0.0;
  std::vector<AgreementPoint> points;

  /// Fraction of points with loa_low <= difference <= loa_high.
  double fraction_within_limits() const;
};

struct BlandAltmanSummary {
  std::array<NutrientAgreement, kNutrientCount> per_nutrient{};

  const NutrientAgreement& operator[](Nutrient n) const { return per_nutrient[static_cast<std::size_t>(n)]; }
};

/// Throws DataError with fewer than two pairs.
BlandAltmanSummary bland_altman(std::span<const PredictionPair> pairs);

struct SvgStyle {
  int width = 720;
  int height = 480;
  std::string mean_color = "red";
  std::string limit_color = "green";
  std::string point_color = "#1f77b4";
};

/// Scatter of (average, difference) with a solid mean-difference line and
/// dotted limits of agreement. The only <line> elements are those three and
/// the only <circle> elements are the points; axes and ticks are <path>s.
/// Output depends only on the arguments.
std::string render_bland_altman_svg(const NutrientAgreement& agreement, Nutrient nutrient,
                                    const std::string& title = {}, const SvgStyle& style = {});

nlohmann::ordered_json to_json(const BlandAltmanSummary& summary);

}  // namespace nutrieval::eval
