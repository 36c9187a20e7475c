#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <random>
#include <regex>

#include "doctest.h"
#include "fixture_constants.hpp"
#include "nutrieval/error.hpp"
#include "nutrieval/eval/bland_altman.hpp"
#include "nutrieval/eval/metrics.hpp"
#include "nutrieval/eval/prediction_parser.hpp"
#include "nutrieval/eval/scoring.hpp"
#include "nutrieval/eval/special_functions.hpp"
#include "reference_stats.hpp"
#include "synthetic.hpp"

using namespace nutrieval;
using namespace nutrieval::eval;
namespace nt = nutrieval::testing;

namespace {

std::vector<PredictionPair> one_nutrient_pairs(const std::vector<double>& t, const std::vector<double>& p) {
  std::vector<PredictionPair> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    PredictionPair pp;
    pp.truth.values.fill(t[i]);
    pp.prediction.values.fill(p[i]);
    out.push_back(pp);
  }
  return out;
}

std::size_t count(const std::string& hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string::npos; pos = hay.find(needle, pos + 1)) ++n;
  return n;
}

InvalidReason reason_of(std::string_view s) {
  auto p = parse_prediction(s);
  REQUIRE_FALSE(p.valid());
  return p.reason;
}

}  // namespace

TEST_CASE("parser accepts the calibration outputs") {
  for (auto s : nt::kExpectedOutputs) {
    auto p = parse_prediction(s);
    REQUIRE(p.valid());
  }
  auto p = parse_prediction("1293; 48.28; 135.41; 29.22; 13.2; 62.15");
  REQUIRE(p.valid());
  CHECK(p.values->values == std::array<double, 6>{1293, 48.28, 135.41, 29.22, 13.2, 62.15});
}

TEST_CASE("parser surface tolerance") {
  CHECK(parse_prediction("  1;2;3;4;5;6  \n").valid());
  CHECK(parse_prediction("1; 2; 3; 4; 5; 6.").valid());
  CHECK_FALSE(parse_prediction("1; 2; 3; 4; 5; 6.", {.allow_trailing_period = false}).valid());
  CHECK_FALSE(parse_prediction("1; 2; 3; 4; 5; 6..").valid());
}

TEST_CASE("parser rejection reasons") {
  CHECK(reason_of("") == InvalidReason::kEmptyReply);
  CHECK(reason_of("   \n\t") == InvalidReason::kEmptyReply);
  CHECK(reason_of("kcal: 1200; 50; 100; 40; 10; 30") == InvalidReason::kExtraText);
  CHECK(reason_of("Answer: 1; 2; 3; 4; 5; 6") == InvalidReason::kExtraText);
  CHECK(reason_of("1; 2; 3; 4; 5") == InvalidReason::kWrongFieldCount);
  CHECK(reason_of("1; 2; 3; 4; 5; 6; 7") == InvalidReason::kWrongFieldCount);
  CHECK(reason_of("1; 2; ; 4; 5; 6") == InvalidReason::kNonNumericField);
  CHECK(reason_of("1; 2; 1.2.3; 4; 5; 6") == InvalidReason::kNonNumericField);
  CHECK(reason_of("1; 2; N/A; 4; 5; 6") == InvalidReason::kNonNumericField);
  CHECK(reason_of("1; -2; 3; 4; 5; 6") == InvalidReason::kNegativeValue);
  CHECK(reason_of("1 kcal; 2; 3; 4; 5; 6") == InvalidReason::kExtraText);
  CHECK(to_string(InvalidReason::kWrongFieldCount) == "wrong_field_count");
  CHECK(invalid_reason_from_string("negative_value") == InvalidReason::kNegativeValue);
}

TEST_CASE("metrics hand cases") {
  auto m = compute_metrics(one_nutrient_pairs({1, 2, 3}, {2, 3, 4}))[Nutrient::kEnergy];
  CHECK(m.ccc == doctest::Approx(4.0 / 7.0).epsilon(1e-12));
  CHECK(m.mae == doctest::Approx(1.0));
  CHECK(m.mse == doctest::Approx(1.0));
  CHECK(m.r2 == doctest::Approx(-0.5));
  CHECK(m.t_test_degenerate);
  CHECK(m.p_value == 0.0);

  auto sym = compute_metrics(one_nutrient_pairs({10, 10, 10, 10}, {11, 9, 10, 10}))[Nutrient::kProtein];
  CHECK(sym.t_stat == 0.0);
  CHECK(sym.p_value == doctest::Approx(1.0));

  auto same = compute_metrics(one_nutrient_pairs({1, 5, 9}, {1, 5, 9}))[Nutrient::kFat];
  CHECK(same.mse == 0.0);
  CHECK(same.mae == 0.0);
  CHECK(same.rmse == 0.0);
  CHECK(same.r2 == 1.0);
  CHECK(same.ccc == 1.0);
  CHECK(same.p_value == 1.0);
}

TEST_CASE("metrics zero-truth and constant-truth conventions") {
  auto m = compute_metrics(one_nutrient_pairs({0, 2, 4}, {1, 3, 4}))[Nutrient::kFiber];
  CHECK(m.mape_n == 2);
  CHECK(m.mape_zero_truth == 1);
  CHECK(m.mape == doctest::Approx((0.5 + 0.0) / 2));

  auto c = compute_metrics(one_nutrient_pairs({3, 3, 3}, {1, 2, 3}))[Nutrient::kEnergy];
  CHECK(c.r2_undefined);
  CHECK(std::isnan(c.r2));
  CHECK_THROWS_AS(compute_metrics({}), DataError);

  auto j = to_json(compute_metrics(one_nutrient_pairs({3, 3, 3}, {1, 2, 3})));
  CHECK(j.dump().find("null") != std::string::npos);
}

TEST_CASE("incomplete beta against Boost") {
  for (double a : {0.5, 1.0, 2.5, 15.0, 500.0}) {
    for (double b : {0.5, 1.0, 3.0, 40.0}) {
      for (double x : {0.0, 1e-6, 0.1, 0.5, 0.9, 0.999999, 1.0}) {
        const double expected = boost::math::ibeta(a, b, x);
        CHECK(nt::close_to(regularized_incomplete_beta(a, b, x), expected, 1e-12));
      }
    }
  }
  CHECK_THROWS_AS(regularized_incomplete_beta(-1, 1, 0.5), std::domain_error);
  CHECK_THROWS_AS(regularized_incomplete_beta(1, 1, 1.5), std::domain_error);
}

TEST_CASE("two-sided t p-values against Boost, df >= 30 to 1e-10") {
  for (double df : {1.0, 5.0, 30.0, 100.0, 1127.0}) {
    boost::math::students_t dist(df);
    for (double t : {0.0, 0.3, 1.0, 1.96, 3.5, 8.0, 25.0}) {
      const double expected = 2 * boost::math::cdf(boost::math::complement(dist, t));
      const double got = student_t_two_sided_p(t, df);
      CHECK(nt::close_to(got, std::min(1.0, expected), df >= 30 ? 1e-10 : 1e-9));
      CHECK(student_t_two_sided_p(-t, df) == got);
    }
  }
}

TEST_CASE("bland-altman hand case and degenerate input") {
  auto pairs = one_nutrient_pairs({10, 20}, {12, 18});
  auto s = bland_altman(pairs)[Nutrient::kEnergy];
  CHECK(s.mean_diff == doctest::Approx(0.0));
  CHECK(s.sd_diff == doctest::Approx(2.8284).epsilon(1e-4));
  CHECK(s.loa_high == doctest::Approx(5.5437).epsilon(1e-4));
  CHECK(s.loa_low == doctest::Approx(-5.5437).epsilon(1e-4));
  CHECK(s.points.size() == 2);
  CHECK(s.points[0].average == 11);
  CHECK(s.points[0].difference == 2);

  auto zero = bland_altman(one_nutrient_pairs({1, 2, 3}, {1, 2, 3}))[Nutrient::kFat];
  CHECK(zero.mean_diff == 0);
  CHECK(zero.sd_diff == 0);
  CHECK(zero.loa_low == 0);
  CHECK(zero.loa_high == 0);
  CHECK_THROWS_AS(bland_altman(one_nutrient_pairs({1}, {1})), DataError);
}

TEST_CASE("bland-altman SVG structure") {
  auto s = bland_altman(one_nutrient_pairs({10, 20}, {12, 18}))[Nutrient::kEnergy];
  const auto svg = render_bland_altman_svg(s, Nutrient::kEnergy, "t");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(count(svg, "<circle") == 2);
  CHECK(count(svg, "<line") == 3);
  CHECK(count(svg, "stroke-dasharray") == 2);
  std::smatch m;
  REQUIRE(std::regex_search(svg, m, std::regex("<line[^>]*mean-difference[^>]*>")));
  CHECK(m.str().find("red") != std::string::npos);
  CHECK(m.str().find("dasharray") == std::string::npos);
  CHECK(svg.find("kcal") != std::string::npos);
  CHECK(svg == render_bland_altman_svg(s, Nutrient::kEnergy, "t"));

  // Degenerate (all-zero) input still renders.
  auto zero = bland_altman(one_nutrient_pairs({1, 2}, {1, 2}))[Nutrient::kFat];
  CHECK(count(render_bland_altman_svg(zero, Nutrient::kFat), "<line") == 3);
}

TEST_CASE("score_results counts exclusions and warns below threshold") {
  std::map<std::string, NutrientVector> truths;
  std::vector<inference::InferenceResult> results;
  for (int i = 0; i < 100; ++i) {
    const auto id = "p" + std::to_string(100 + i);
    NutrientVector v{{100.0 + i, 5, 10, 3, 1, 2}};
    truths[id] = v;
    inference::InferenceResult r;
    r.participant_id = id;
    r.raw_text = i < 12 ? (i % 2 ? "N/A" : "") : "100; 5; 10; 3; 1; 2";
    results.push_back(r);
  }
  auto report = score_results(results, truths);
  CHECK(report.total == 100);
  CHECK(report.metrics.effective_n == 88);
  CHECK(report.metrics.excluded_n == 12);
  CHECK(report.low_effective_n);
  CHECK_FALSE(report.warnings.empty());
  std::size_t sum = 0;
  for (auto c : report.excluded_by_reason) sum += c;
  CHECK(sum == 12);
  CHECK(report.excluded_by_reason[static_cast<std::size_t>(InvalidReason::kEmptyReply)] == 6);
  const auto table = render_metric_table(report, "demo");
  CHECK(table.find("DRxIKCAL") != std::string::npos);
  CHECK(table.find("effective_n") != std::string::npos);
  CHECK(table.find("empty_reply") != std::string::npos);

  results[50].participant_id = "stranger";
  CHECK_THROWS_AS(score_results(results, truths), DataError);
}
