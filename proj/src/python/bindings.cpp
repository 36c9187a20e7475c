// Python bindings for the core operations.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "nutrieval/error.hpp"
#include "nutrieval/eval/bland_altman.hpp"
#include "nutrieval/eval/metrics.hpp"
#include "nutrieval/eval/prediction_parser.hpp"
#include "nutrieval/inference/nutrient_table.hpp"
#include "nutrieval/prompt/prompt.hpp"
#include "nutrieval/recall/food_string.hpp"
#include "nutrieval/recall/partition.hpp"

namespace py = pybind11;
using namespace nutrieval;

namespace {

using Six = std::array<double, kNutrientCount>;

NutrientVector to_vector(const Six& a) { return NutrientVector{a}; }

std::vector<eval::PredictionPair> to_pairs(const std::vector<std::pair<Six, Six>>& pairs) {
  std::vector<eval::PredictionPair> out;
  out.reserve(pairs.size());
  for (const auto& [t, p] : pairs) out.push_back({to_vector(t), to_vector(p)});
  return out;
}

py::dict metrics_dict(const eval::NutrientMetrics& m) {
  py::dict d;
  d["mse"] = m.mse;
  d["mae"] = m.mae;
  d["mape"] = m.mape;
  d["rmse"] = m.rmse;
  d["r2"] = m.r2;
  d["t_stat"] = m.t_stat;
  d["p_value"] = m.p_value;
  d["ccc"] = m.ccc;
  d["pearson_r"] = m.pearson_r;
  d["mean_diff"] = m.mean_diff;
  d["mape_n"] = m.mape_n;
  d["mape_zero_truth"] = m.mape_zero_truth;
  d["t_test_degenerate"] = m.t_test_degenerate;
  d["r2_undefined"] = m.r2_undefined;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Dietary recall nutrient-estimation harness";

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  auto data = py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<GrammarError>(m, "GrammarError", data.ptr());
  py::register_exception<BackendError>(m, "BackendError", base.ptr());

  py::list keys;
  for (auto n : kAllNutrients) keys.append(std::string(nutrient_key(n)));
  m.attr("NUTRIENTS") = py::tuple(keys);
  m.attr("FIXTURE_SHA256") = std::string(prompt::kFixtureSha256);

  m.def(
      "render_food_string",
      [](const std::vector<std::pair<std::string, double>>& items) {
        std::vector<recall::FoodEntry> entries;
        for (const auto& [d, g] : items) entries.push_back({d, g});
        return recall::render_food_string(entries);
      },
      py::arg("items"), "[(descriptor, grams), ...] -> 'DESCRIPTOR (grams); ...'");
  m.def(
      "parse_food_string",
      [](std::string_view text) {
        std::vector<std::pair<std::string, double>> out;
        for (auto& e : recall::parse_food_string(text)) out.emplace_back(std::move(e.descriptor), e.grams);
        return out;
      },
      py::arg("text"));

  m.def(
      "partition_cohort",
      [](const std::vector<std::string>& ids, std::size_t n_subsets, bool first_subset_extra, std::uint64_t seed,
         bool shuffle) {
        return recall::partition_cohort(ids, {n_subsets, first_subset_extra, shuffle, seed}).subsets;
      },
      py::arg("ids"), py::arg("n_subsets") = 10, py::arg("first_subset_extra") = true,
      py::arg("seed") = recall::PartitionOptions{}.seed, py::arg("shuffle") = true);

  m.def("format_target", [](const Six& v) { return prompt::format_target(to_vector(v)); }, py::arg("values"));
  m.def("fixture_checksum", [] { return prompt::default_template().fixture_sha256; });
  m.def(
      "render_prompt",
      [](std::string_view food_string, const std::string& fidelity) {
        const auto b = prompt::render_prompt(prompt::default_template(prompt::fidelity_from_string(fidelity)),
                                             food_string);
        return std::make_pair(b.system_message, b.user_message);
      },
      py::arg("food_string"), py::arg("fidelity") = "verbatim", "-> (system_message, user_message)");

  m.def(
      "parse_prediction",
      [](std::string_view text, bool strict) -> py::object {
        const auto p = eval::parse_prediction(text, {.allow_trailing_period = !strict});
        if (p.valid()) return py::cast(p.values->values);
        return py::str(std::string(eval::to_string(p.reason)));
      },
      py::arg("text"), py::arg("strict") = false,
      "Six floats for a valid reply, otherwise the rejection reason as a string.");

  m.def(
      "compute_metrics",
      [](const std::vector<std::pair<Six, Six>>& pairs) {
        const auto ms = eval::compute_metrics(to_pairs(pairs));
        py::dict out;
        for (auto n : kAllNutrients) out[py::str(std::string(nutrient_key(n)))] = metrics_dict(ms[n]);
        return out;
      },
      py::arg("pairs"), "[(truth6, prediction6), ...] -> {nutrient: {metric: value}}");

  m.def(
      "bland_altman",
      [](const std::vector<std::pair<Six, Six>>& pairs) {
        const auto s = eval::bland_altman(to_pairs(pairs));
        py::dict out;
        for (auto n : kAllNutrients) {
          const auto& a = s[n];
          py::dict d;
          d["mean_diff"] = a.mean_diff;
          d["sd_diff"] = a.sd_diff;
          d["loa_low"] = a.loa_low;
          d["loa_high"] = a.loa_high;
          d["fraction_within_limits"] = a.fraction_within_limits();
          out[py::str(std::string(nutrient_key(n)))] = d;
        }
        return out;
      },
      py::arg("pairs"));

  m.def(
      "render_bland_altman_svg",
      [](const std::vector<std::pair<Six, Six>>& pairs, const std::string& nutrient, const std::string& title) {
        for (auto n : kAllNutrients) {
          if (nutrient_key(n) == nutrient) return eval::render_bland_altman_svg(eval::bland_altman(to_pairs(pairs))[n], n, title);
        }
        throw ConfigError("unknown nutrient \"" + nutrient + "\"");
      },
      py::arg("pairs"), py::arg("nutrient") = "kcal", py::arg("title") = "");

  m.def(
      "oracle_estimate",
      [](const std::vector<std::pair<std::string, double>>& items, const std::map<std::string, Six>& table) {
        inference::NutrientTable t;
        for (const auto& [d, v] : table) t.add(d, to_vector(v));
        std::vector<recall::FoodEntry> entries;
        for (const auto& [d, g] : items) entries.push_back({d, g});
        return inference::oracle_estimate(entries, t).values;
      },
      py::arg("items"), py::arg("table"), "Per-100 g table lookup summed over (descriptor, grams) items.");
}
