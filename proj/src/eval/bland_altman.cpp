#include "nutrieval/eval/bland_altman.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "nutrieval/error.hpp"

namespace nutrieval::eval {

namespace {

std::string fixed(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) s = s.front() == '-' ? s.substr(1) : s;
  return s;
}

std::string escape_xml(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  double step = 0.2;
  int decimals = 1;
};

// Range padded by 5% and rounded outward to a 1/2/5 x 10^k tick step.
Axis make_axis(double lo, double hi) {
  if (!(hi > lo)) {
    const double half = std::max(1.0, std::fabs(lo) * 0.1);
    lo -= half;
    hi += half;
  }
  const double pad = (hi - lo) * 0.05;
  lo -= pad;
  hi += pad;
  const double raw = (hi - lo) / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double nice = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
  Axis a;
  a.step = nice * mag;
  a.lo = std::floor(lo / a.step) * a.step;
  a.hi = std::ceil(hi / a.step) * a.step;
  a.decimals = std::max(0, -static_cast<int>(std::floor(std::log10(a.step) + 1e-9)));
  return a;
}

}  // namespace

double NutrientAgreement::fraction_within_limits() const {
  if (points.empty()) return 0.0;
  const auto inside = std::count_if(points.begin(), points.end(), [&](const AgreementPoint& p) {
    return p.difference >= loa_low && p.difference <= loa_high;
  });
  return static_cast<double>(inside) / static_cast<double>(points.size());
}

BlandAltmanSummary bland_altman(std::span<const PredictionPair> pairs) {
  if (pairs.size() < 2) throw DataError("bland_altman: need at least two pairs");
  const double n = static_cast<double>(pairs.size());
  BlandAltmanSummary out;
  for (auto nutrient : kAllNutrients) {
    auto& a = out.per_nutrient[static_cast<std::size_t>(nutrient)];
    a.points.reserve(pairs.size());
    double sum = 0.0;
    for (const auto& p : pairs) {
      const double pred = p.prediction[nutrient];
      const double truth = p.truth[nutrient];
      a.points.push_back({(pred + truth) / 2.0, pred - truth});
      sum += pred - truth;
    }
    a.mean_diff = sum / n;
    double ss = 0.0;
    for (const auto& pt : a.points) ss += (pt.difference - a.mean_diff) * (pt.difference - a.mean_diff);
    a.sd_diff = std::sqrt(ss / (n - 1.0));
    a.loa_low = a.mean_diff - kLimitsMultiplier * a.sd_diff;
    a.loa_high = a.mean_diff + kLimitsMultiplier * a.sd_diff;
  }
  return out;
}

std::string render_bland_altman_svg(const NutrientAgreement& agreement, Nutrient nutrient, const std::string& title,
                                    const SvgStyle& style) {
  double x_lo = 0.0, x_hi = 0.0, y_lo = agreement.loa_low, y_hi = agreement.loa_high;
  if (!agreement.points.empty()) {
    x_lo = x_hi = agreement.points.front().average;
  }
  for (const auto& p : agreement.points) {
    x_lo = std::min(x_lo, p.average);
    x_hi = std::max(x_hi, p.average);
    y_lo = std::min(y_lo, p.difference);
    y_hi = std::max(y_hi, p.difference);
  }
  const Axis xa = make_axis(x_lo, x_hi);
  const Axis ya = make_axis(y_lo, y_hi);

  const double left = 80, right = style.width - 30.0, top = 50, bottom = style.height - 60.0;
  auto sx = [&](double x) { return left + (x - xa.lo) / (xa.hi - xa.lo) * (right - left); };
  auto sy = [&](double y) { return bottom - (y - ya.lo) / (ya.hi - ya.lo) * (bottom - top); };

  const std::string unit(nutrient_unit(nutrient));
  const std::string label(nutrient_label(nutrient));
  const std::string heading = title.empty() ? "Bland-Altman: " + label : title;

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" viewBox=\"0 0 " + std::to_string(style.width) + " " +
         std::to_string(style.height) + "\" font-family=\"sans-serif\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + std::to_string(style.width) + "\" height=\"" +
         std::to_string(style.height) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(style.width / 2.0) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" +
         escape_xml(heading) + "</text>\n";

  // Axes frame and ticks.
  std::string axes = "M" + fixed(left) + "," + fixed(top) + " V" + fixed(bottom) + " H" + fixed(right);
  std::string labels;
  const int x_ticks = static_cast<int>(std::lround((xa.hi - xa.lo) / xa.step));
  for (int i = 0; i <= x_ticks; ++i) {
    const double v = xa.lo + i * xa.step;
    const double px = sx(v);
    axes += " M" + fixed(px) + "," + fixed(bottom) + " v5";
    labels += "<text x=\"" + fixed(px) + "\" y=\"" + fixed(bottom + 20) + "\" text-anchor=\"middle\" font-size=\"11\">" +
              fixed(v, xa.decimals) + "</text>\n";
  }
  const int y_ticks = static_cast<int>(std::lround((ya.hi - ya.lo) / ya.step));
  for (int i = 0; i <= y_ticks; ++i) {
    const double v = ya.lo + i * ya.step;
    const double py = sy(v);
    axes += " M" + fixed(left) + "," + fixed(py) + " h-5";
    labels += "<text x=\"" + fixed(left - 8) + "\" y=\"" + fixed(py + 4) + "\" text-anchor=\"end\" font-size=\"11\">" +
              fixed(v, ya.decimals) + "</text>\n";
  }
  svg += "<path class=\"axes\" d=\"" + axes + "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg += labels;
  svg += "<text x=\"" + fixed((left + right) / 2) + "\" y=\"" + fixed(style.height - 15.0) +
         "\" text-anchor=\"middle\" font-size=\"13\">Mean of prediction and ground truth (" + unit + ")</text>\n";
  svg += "<text x=\"20\" y=\"" + fixed((top + bottom) / 2) + "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 " +
         fixed((top + bottom) / 2) + ")\">Prediction minus ground truth (" + unit + ")</text>\n";

  svg += "<g class=\"points\" fill=\"" + style.point_color + "\" fill-opacity=\"0.5\">\n";
  for (const auto& p : agreement.points) {
    svg += "<circle cx=\"" + fixed(sx(p.average)) + "\" cy=\"" + fixed(sy(p.difference)) + "\" r=\"2.5\"/>\n";
  }
  svg += "</g>\n";

  auto hline = [&](double y, const std::string& cls, const std::string& color, bool dotted) {
    std::string l = "<line class=\"" + cls + "\" x1=\"" + fixed(left) + "\" y1=\"" + fixed(sy(y)) + "\" x2=\"" +
                    fixed(right) + "\" y2=\"" + fixed(sy(y)) + "\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
    if (dotted) l += " stroke-dasharray=\"2,4\"";
    return l + "/>\n";
  };
  svg += hline(agreement.mean_diff, "mean-difference", style.mean_color, false);
  svg += hline(agreement.loa_high, "limit-upper", style.limit_color, true);
  svg += hline(agreement.loa_low, "limit-lower", style.limit_color, true);

  auto annotate = [&](double y, const std::string& text) {
    svg += "<text x=\"" + fixed(right - 4) + "\" y=\"" + fixed(sy(y) - 4) +
           "\" text-anchor=\"end\" font-size=\"11\">" + text + "</text>\n";
  };
  annotate(agreement.mean_diff, "mean " + fixed(agreement.mean_diff));
  annotate(agreement.loa_high, "+1.96 SD " + fixed(agreement.loa_high));
  annotate(agreement.loa_low, "-1.96 SD " + fixed(agreement.loa_low));

  svg += "</svg>\n";
  return svg;
}

nlohmann::ordered_json to_json(const BlandAltmanSummary& summary) {
  nlohmann::ordered_json doc;
  for (auto nutrient : kAllNutrients) {
    const auto& a = summary[nutrient];
    doc[std::string(nutrient_key(nutrient))] = {{"mean_diff", a.mean_diff},
                                                {"sd_diff", a.sd_diff},
                                                {"loa_low", a.loa_low},
                                                {"loa_high", a.loa_high},
                                                {"n_points", a.points.size()},
                                                {"fraction_within_limits", a.fraction_within_limits()}};
  }
  return doc;
}

}  // namespace nutrieval::eval
