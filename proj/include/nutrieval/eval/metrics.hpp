#pragma once

#include <array>
#include <cstddef>
#include <span>

#include "json.hpp"
#include "nutrieval/nutrients.hpp"

namespace nutrieval::eval {

struct PredictionPair {
  NutrientVector truth;
  NutrientVector prediction;
};

/// Validation statistics for one outcome over n (truth, prediction) pairs.
///
/// Conventions: R² is the coefficient of determination 1 - SSE/SST, not the
/// squared correlation. CCC and Pearson r use population (1/n) moments. MAPE
/// is a fraction (not percent) averaged over pairs with truth > 0 only.
struct NutrientMetrics {
  double mse = 0.0;
  double mae = 0.0;
  double mape = 0.0;
  double rmse = 0.0;
  double r2 = 0.0;
  double t_stat = 0.0;
  double p_value = 1.0;
  double ccc = 0.0;
  double pearson_r = 0.0;
  double mean_diff = 0.0;

  /// Pairs that entered MAPE, and zero-truth pairs left out of it.
  std::size_t mape_n = 0;
  std::size_t mape_zero_truth = 0;
  /// Zero variance of differences (or n = 1): p is 1 if mean diff is 0, else 0.
  bool t_test_degenerate = false;
  /// Constant truth: R² undefined (NaN).
  bool r2_undefined = false;
};

struct MetricSet {
  std::array<NutrientMetrics, kNutrientCount> per_nutrient{};
  std::size_t effective_n = 0;
  std::size_t excluded_n = 0;

  const NutrientMetrics& operator[](Nutrient n) const { return per_nutrient[static_cast<std::size_t>(n)]; }
};

/// Computes every statistic per nutrient. Throws DataError on an empty input.
/// The paired t-test is two-sided on d = prediction - truth with n - 1
/// degrees of freedom.
MetricSet compute_metrics(std::span<const PredictionPair> pairs);

/// Non-finite values serialize as null.
nlohmann::ordered_json to_json(const MetricSet& metrics);

}  // namespace nutrieval::eval
