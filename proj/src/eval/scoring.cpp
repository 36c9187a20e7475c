#include "nutrieval/eval/scoring.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "nutrieval/error.hpp"

namespace nutrieval::eval {

namespace fs = std::filesystem;

namespace {

std::string with_thousands(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return out;
}

std::string cell(double v) {
  if (!std::isfinite(v)) return std::isinf(v) ? (v > 0 ? "inf" : "-inf") : "NA";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string p_cell(double p) {
  if (std::isfinite(p) && p < 0.001) return "<0.001";
  return cell(p);
}

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out.flush()) throw ConfigError("write failed for " + path.string());
}

}  // namespace

ScoreReport score_results(std::span<const inference::InferenceResult> results,
                          const std::map<std::string, NutrientVector>& truths, const ParseOptions& options) {
  ScoreReport report;
  report.total = results.size();
  report.strict = !options.allow_trailing_period;
  for (const auto& r : results) {
    auto truth = truths.find(r.participant_id);
    if (truth == truths.end()) throw DataError("score: no ground truth for participant \"" + r.participant_id + "\"");
    auto parsed = parse_prediction(r.raw_text, options);
    if (parsed.valid()) {
      report.pairs.push_back({truth->second, *parsed.values});
    } else {
      ++report.excluded_by_reason[static_cast<std::size_t>(parsed.reason)];
      report.exclusions.push_back({r.participant_id, parsed.reason, r.raw_text});
    }
  }
  if (report.pairs.empty()) throw DataError("score: no valid predictions among " + std::to_string(report.total));

  report.metrics = compute_metrics(report.pairs);
  report.metrics.excluded_n = report.exclusions.size();
  if (report.pairs.size() >= 2) report.agreement = bland_altman(report.pairs);

  const double fraction = static_cast<double>(report.metrics.effective_n) / static_cast<double>(report.total);
  if (fraction < kMinEffectiveFraction) {
    report.low_effective_n = true;
    char buf[160];
    std::snprintf(buf, sizeof buf, "effective n %zu of %zu (%.1f%%) is below the 89%% validity threshold",
                  report.metrics.effective_n, report.total, 100.0 * fraction);
    report.warnings.emplace_back(buf);
  }
  for (auto nutrient : kAllNutrients) {
    const auto& m = report.metrics[nutrient];
    const std::string key(nutrient_key(nutrient));
    if (m.mape_zero_truth) {
      report.warnings.push_back(key + ": " + std::to_string(m.mape_zero_truth) +
                                " zero-truth pair(s) left out of MAPE");
    }
    if (m.t_test_degenerate) report.warnings.push_back(key + ": paired t-test degenerate (zero-variance differences)");
    if (m.r2_undefined) report.warnings.push_back(key + ": R2 undefined (constant ground truth)");
  }
  return report;
}

nlohmann::ordered_json to_json(const ScoreReport& report) {
  nlohmann::ordered_json doc;
  doc["total"] = report.total;
  auto metrics = to_json(report.metrics);
  doc["effective_n"] = metrics["effective_n"];
  doc["excluded_n"] = metrics["excluded_n"];
  doc["effective_fraction"] =
      static_cast<double>(report.metrics.effective_n) / static_cast<double>(report.total);
  doc["low_effective_n_warning"] = report.low_effective_n;
  doc["conventions"] = {{"r2", "coefficient_of_determination"},
                        {"ccc_moments", "population"},
                        {"mape", "fraction, zero-truth pairs excluded"},
                        {"t_test", "paired two-sided, d = prediction - truth"},
                        {"bland_altman_sd", "sample"},
                        {"parser", report.strict ? "strict" : "trailing-period-tolerant"}};
  doc["metrics"] = metrics["metrics"];
  auto& by_reason = doc["exclusions_by_reason"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < kInvalidReasonCount; ++i) {
    by_reason[std::string(to_string(static_cast<InvalidReason>(i)))] = report.excluded_by_reason[i];
  }
  if (report.agreement) doc["bland_altman"] = to_json(*report.agreement);
  doc["warnings"] = report.warnings;
  return doc;
}

std::string render_metric_table(const ScoreReport& report, const std::string& title) {
  constexpr std::size_t kLabel = 16;
  constexpr std::size_t kCol = 13;
  std::string out;
  if (!title.empty()) out += title + "\n";

  out += pad_right("(N=" + with_thousands(report.metrics.effective_n) + ")", kLabel);
  for (auto n : kAllNutrients) out += pad_left(std::string(nutrient_code(n)), kCol);
  out += "\n";

  auto row = [&](const std::string& label, auto get) {
    out += pad_right(label, kLabel);
    for (auto n : kAllNutrients) out += pad_left(get(report.metrics[n]), kCol);
    out += "\n";
  };
  row("MSE", [](const NutrientMetrics& m) { return cell(m.mse); });
  row("MAE", [](const NutrientMetrics& m) { return cell(m.mae); });
  row("MAPE", [](const NutrientMetrics& m) { return cell(m.mape); });
  row("RMSE", [](const NutrientMetrics& m) { return cell(m.rmse); });
  row("R2", [](const NutrientMetrics& m) { return cell(m.r2); });
  row("T statistic", [](const NutrientMetrics& m) { return cell(m.t_stat); });
  row("T-test p-value", [](const NutrientMetrics& m) { return p_cell(m.p_value); });
  row("Lin's CCC", [](const NutrientMetrics& m) { return cell(m.ccc); });

  out += "\n";
  out += "effective_n " + std::to_string(report.metrics.effective_n) + " of " + std::to_string(report.total) +
         " (excluded " + std::to_string(report.metrics.excluded_n) + ")\n";
  if (report.metrics.excluded_n) {
    out += "exclusions:\n";
    for (std::size_t i = 0; i < kInvalidReasonCount; ++i) {
      if (report.excluded_by_reason[i]) {
        out += "  " + pad_right(std::string(to_string(static_cast<InvalidReason>(i))), 20) +
               std::to_string(report.excluded_by_reason[i]) + "\n";
      }
    }
  }
  for (const auto& w : report.warnings) out += "warning: " + w + "\n";
  return out;
}

std::vector<fs::path> write_report(const ScoreReport& report, const fs::path& dir, const std::string& title) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<fs::path> written;

  write_file(dir / "metrics.json", to_json(report).dump(2) + "\n");
  written.push_back(dir / "metrics.json");
  write_file(dir / "metrics.txt", render_metric_table(report, title));
  written.push_back(dir / "metrics.txt");

  std::string lines;
  for (const auto& e : report.exclusions) {
    lines += nlohmann::ordered_json{{"participant_id", e.participant_id},
                                    {"stage", "parse"},
                                    {"reason", to_string(e.reason)},
                                    {"raw_text", e.raw_text}}
                 .dump() +
             "\n";
  }
  write_file(dir / "scored_exclusions.jsonl", lines);
  written.push_back(dir / "scored_exclusions.jsonl");

  if (report.agreement) {
    for (auto n : kAllNutrients) {
      const auto path = dir / ("bland_altman_" + std::string(nutrient_key(n)) + ".svg");
      const std::string heading = title.empty() ? std::string() : title + ": " + std::string(nutrient_label(n));
      write_file(path, render_bland_altman_svg((*report.agreement)[n], n, heading));
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace nutrieval::eval
