#include "nutrieval/eval/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "nutrieval/error.hpp"
#include "nutrieval/eval/special_functions.hpp"

namespace nutrieval::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

NutrientMetrics compute_one(const std::vector<double>& truth, const std::vector<double>& pred) {
  const std::size_t n = truth.size();
  const double dn = static_cast<double>(n);
  NutrientMetrics m;

  const double t_mean = mean(truth);
  const double p_mean = mean(pred);

  double sse = 0.0, sae = 0.0, sst = 0.0, ape = 0.0;
  double s_tt = 0.0, s_pp = 0.0, s_tp = 0.0;
  double d_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = pred[i] - truth[i];
    sse += d * d;
    sae += std::fabs(d);
    d_sum += d;
    const double dt = truth[i] - t_mean;
    const double dp = pred[i] - p_mean;
    sst += dt * dt;
    s_tt += dt * dt;
    s_pp += dp * dp;
    s_tp += dt * dp;
    if (truth[i] > 0.0) {
      ape += std::fabs(d) / truth[i];
      ++m.mape_n;
    } else {
      ++m.mape_zero_truth;
    }
  }

  m.mse = sse / dn;
  m.mae = sae / dn;
  m.rmse = std::sqrt(m.mse);
  m.mape = m.mape_n ? ape / static_cast<double>(m.mape_n) : kNaN;

  if (sst > 0.0) {
    m.r2 = 1.0 - sse / sst;
  } else {
    m.r2 = kNaN;
    m.r2_undefined = true;
  }

  const double var_t = s_tt / dn;
  const double var_p = s_pp / dn;
  const double cov = s_tp / dn;
  const double shift = p_mean - t_mean;
  const double ccc_den = var_t + var_p + shift * shift;
  m.ccc = ccc_den > 0.0 ? 2.0 * cov / ccc_den : 1.0;
  m.pearson_r = (var_t > 0.0 && var_p > 0.0) ? cov / std::sqrt(var_t * var_p) : kNaN;

  // Paired t-test on d = pred - truth.
  const double d_mean = d_sum / dn;
  m.mean_diff = d_mean;
  double ss_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = (pred[i] - truth[i]) - d_mean;
    ss_d += e * e;
  }
  if (n >= 2 && ss_d > 0.0) {
    const double sd = std::sqrt(ss_d / (dn - 1.0));
    m.t_stat = d_mean / (sd / std::sqrt(dn));
    m.p_value = student_t_two_sided_p(m.t_stat, dn - 1.0);
  } else {
    m.t_test_degenerate = true;
    if (d_mean == 0.0) {
      m.t_stat = 0.0;
      m.p_value = 1.0;
    } else {
      m.t_stat = std::copysign(std::numeric_limits<double>::infinity(), d_mean);
      m.p_value = 0.0;
    }
  }
  return m;
}

nlohmann::ordered_json number(double v) { return std::isfinite(v) ? nlohmann::ordered_json(v) : nullptr; }

}  // namespace

MetricSet compute_metrics(std::span<const PredictionPair> pairs) {
  if (pairs.empty()) throw DataError("compute_metrics: no valid prediction pairs");
  MetricSet out;
  out.effective_n = pairs.size();
  std::vector<double> truth(pairs.size()), pred(pairs.size());
  for (auto nutrient : kAllNutrients) {
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      truth[i] = pairs[i].truth[nutrient];
      pred[i] = pairs[i].prediction[nutrient];
    }
    out.per_nutrient[static_cast<std::size_t>(nutrient)] = compute_one(truth, pred);
  }
  return out;
}

nlohmann::ordered_json to_json(const MetricSet& metrics) {
  nlohmann::ordered_json doc;
  doc["effective_n"] = metrics.effective_n;
  doc["excluded_n"] = metrics.excluded_n;
  auto& per = doc["metrics"];
  for (auto nutrient : kAllNutrients) {
    const auto& m = metrics[nutrient];
    per[std::string(nutrient_key(nutrient))] = {
        {"mse", number(m.mse)},
        {"mae", number(m.mae)},
        {"mape", number(m.mape)},
        {"rmse", number(m.rmse)},
        {"r2", number(m.r2)},
        {"t_stat", number(m.t_stat)},
        {"p_value", number(m.p_value)},
        {"ccc", number(m.ccc)},
        {"pearson_r", number(m.pearson_r)},
        {"mean_diff", number(m.mean_diff)},
        {"mape_n", m.mape_n},
        {"mape_zero_truth_excluded", m.mape_zero_truth},
        {"t_test_degenerate", m.t_test_degenerate},
        {"r2_undefined", m.r2_undefined},
    };
  }
  return doc;
}

}  // namespace nutrieval::eval
