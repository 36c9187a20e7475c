#include "reference_stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nutrieval::testing {

ReferenceMetrics reference_metrics(const std::vector<double>& truth, const std::vector<double>& pred) {
  if (truth.size() != pred.size() || truth.empty()) throw std::invalid_argument("size mismatch");
  using LD = long double;
  const LD n = static_cast<LD>(truth.size());

  LD st = 0, sp = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    st += truth[i];
    sp += pred[i];
  }
  const LD mt = st / n, mp = sp / n;

  LD sse = 0, sae = 0, sst = 0, spp = 0, stp = 0, ape = 0;
  std::size_t ape_n = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const LD e = LD(pred[i]) - LD(truth[i]);
    sse += e * e;
    sae += std::fabs(e);
    sst += (truth[i] - mt) * (truth[i] - mt);
    spp += (pred[i] - mp) * (pred[i] - mp);
    stp += (truth[i] - mt) * (pred[i] - mp);
    if (truth[i] > 0) {
      ape += std::fabs(e) / truth[i];
      ++ape_n;
    }
  }

  ReferenceMetrics r;
  r.mse = static_cast<double>(sse / n);
  r.mae = static_cast<double>(sae / n);
  r.rmse = std::sqrt(r.mse);
  r.mape = ape_n ? static_cast<double>(ape / ape_n) : std::numeric_limits<double>::quiet_NaN();
  r.mape_n = ape_n;
  r.r2 = sst > 0 ? static_cast<double>(1 - sse / sst) : std::numeric_limits<double>::quiet_NaN();

  const LD var_t = sst / n, var_p = spp / n, cov = stp / n;
  const LD ccc_den = var_t + var_p + (mp - mt) * (mp - mt);
  r.ccc = ccc_den > 0 ? static_cast<double>(2 * cov / ccc_den) : 1.0;
  r.pearson_r = (var_t > 0 && var_p > 0) ? static_cast<double>(cov / std::sqrt(var_t * var_p)) : 0.0;

  // Paired t on d = pred - truth.
  const LD md = mp - mt;
  LD sdd = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const LD d = LD(pred[i]) - LD(truth[i]) - md;
    sdd += d * d;
  }
  if (truth.size() < 2 || sdd == 0) {
    r.t_stat = md == 0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), double(md));
    r.p_value = md == 0 ? 1.0 : 0.0;
    return r;
  }
  const LD sd = std::sqrt(sdd / (n - 1));
  r.t_stat = static_cast<double>(md / (sd / std::sqrt(n)));
  boost::math::students_t dist(static_cast<double>(n - 1));
  r.p_value = 2 * boost::math::cdf(boost::math::complement(dist, std::fabs(r.t_stat)));
  r.p_value = std::min(1.0, r.p_value);
  return r;
}

ReferenceAgreement reference_bland_altman(const std::vector<double>& truth, const std::vector<double>& pred) {
  using LD = long double;
  const std::size_t n = truth.size();
  LD s = 0;
  for (std::size_t i = 0; i < n; ++i) s += LD(pred[i]) - LD(truth[i]);
  const LD m = s / n;
  LD ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const LD d = LD(pred[i]) - LD(truth[i]) - m;
    ss += d * d;
  }
  ReferenceAgreement a;
  a.mean_diff = static_cast<double>(m);
  a.sd_diff = static_cast<double>(std::sqrt(ss / (n - 1)));
  a.loa_low = a.mean_diff - 1.96 * a.sd_diff;
  a.loa_high = a.mean_diff + 1.96 * a.sd_diff;
  return a;
}

bool close_to(double a, double b, double tol) {
  if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
  if (std::isinf(a) || std::isinf(b)) return a == b;
  return std::fabs(a - b) <= std::max(tol, tol * std::max(std::fabs(a), std::fabs(b)));
}

}  // namespace nutrieval::testing
