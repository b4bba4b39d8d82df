#include "stylized/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stylized/error.hpp"
#include "stylized/stats.hpp"

namespace stylized {

JarqueBera jarque_bera(std::span<const double> values) {
  if (values.size() < 8) {
    throw Error(Errc::insufficient_data,
                "jarque_bera needs at least 8 values, got " + std::to_string(values.size()));
  }
  const auto m = stats::central_moments(values);
  if (!(m.variance > 0.0)) throw Error(Errc::degenerate_series, "jarque_bera of a constant sample");
  const auto n = static_cast<double>(values.size());
  const double excess = m.kurtosis - 3.0;
  JarqueBera jb;
  jb.skewness = m.skewness;
  jb.kurtosis = m.kurtosis;
  jb.statistic = n / 6.0 * (m.skewness * m.skewness + 0.25 * excess * excess);
  jb.p_value = stats::chi2_df2_sf(jb.statistic);
  return jb;
}

std::vector<double> JbScan::horizons_days() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.horizon_days);
  return out;
}

std::vector<double> JbScan::jb_values() const {
  std::vector<double> out;
  for (const auto& p : points) out.push_back(p.statistic);
  return out;
}

std::vector<double> default_jb_horizons() {
  return {1.0 / 24.0, 4.0 / 24.0, 12.0 / 24.0, 1.0, 2.0, 4.0, 7.0, 14.0, 30.0};
}

std::vector<double> non_overlapping_returns(const PriceSeries& prices, std::int64_t horizon_seconds) {
  const auto pts = prices.points();
  std::vector<double> out;
  std::size_t anchor = 0;
  while (anchor < pts.size()) {
    const Timestamp target = pts[anchor].time + horizon_seconds;
    const auto it = std::lower_bound(pts.begin() + static_cast<std::ptrdiff_t>(anchor), pts.end(), target,
                                     [](const PricePoint& p, Timestamp t) { return p.time < t; });
    if (it == pts.end()) break;
    if (it->time == target) {
      out.push_back(std::log(it->price) - std::log(pts[anchor].price));
      anchor = static_cast<std::size_t>(it - pts.begin());
    } else {
      ++anchor;
    }
  }
  return out;
}

JbScan jb_scan(const PriceSeries& prices, std::span<const double> horizons_days) {
  JbScan scan;
  const auto interval = prices.interval_seconds();
  std::vector<double> log_h, log_jb;
  for (double days : horizons_days) {
    const auto steps = std::llround(days * 86400.0 / static_cast<double>(interval));
    if (steps < 1) {
      scan.dropped_horizons.push_back(days);
      continue;
    }
    const std::int64_t seconds = steps * interval;
    const auto returns = non_overlapping_returns(prices, seconds);
    try {
      const auto jb = jarque_bera(returns);
      if (!(jb.statistic > 0.0)) throw Error(Errc::degenerate_series, "zero JB");
      scan.points.push_back({days, seconds, returns.size(), jb.statistic, jb.p_value});
      log_h.push_back(std::log10(days));
      log_jb.push_back(std::log10(jb.statistic));
    } catch (const Error&) {
      scan.dropped_horizons.push_back(days);
    }
  }
  if (scan.points.size() < 3) {
    throw Error(Errc::insufficient_data, prices.asset_id() + ": only " +
                                             std::to_string(scan.points.size()) +
                                             " usable JB horizons, need 3");
  }
  const auto fit = stats::ols(log_h, log_jb);
  scan.slope = fit.slope;
  scan.slope_stderr = fit.slope_stderr;
  scan.intercept = fit.intercept;
  return scan;
}

JbScan jb_scan(const PriceSeries& prices) {
  const auto h = default_jb_horizons();
  return jb_scan(prices, h);
}

MountainCdf mountain_cdf(std::span<const double> values) {
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const auto n = static_cast<double>(v.size());
  MountainCdf out;
  std::vector<MountainPoint> negatives;
  for (std::size_t lo = 0; lo < v.size();) {
    std::size_t hi = lo;
    while (hi < v.size() && v[hi] == v[lo]) ++hi;
    const double x = v[lo];
    if (x >= 0.0) {
      out.right.push_back({x, static_cast<double>(v.size() - hi) / n});
    } else {
      negatives.push_back({-x, static_cast<double>(hi) / n});
    }
    lo = hi;
  }
  out.left.assign(negatives.rbegin(), negatives.rend());
  return out;
}

MountainCdf mountain_cdf(const ReturnSeries& norm_returns) {
  const auto v = norm_returns.values();
  return mountain_cdf(v);
}

namespace {

enum class TailModel { power, exponential };

TailFit fit_tail(const ReturnSeries& returns, TailSide side, double threshold, std::size_t min_tail,
                 TailModel model) {
  if (!(threshold > 0.0)) throw Error(Errc::invalid_argument, "tail threshold must be positive");
  const auto mc = mountain_cdf(returns);
  const auto& branch = side == TailSide::right ? mc.right : mc.left;
  std::vector<double> xs, ys;
  for (const auto& p : branch) {
    if (p.x > threshold && p.value > 0.0) {
      xs.push_back(model == TailModel::power ? std::log(p.x) : p.x);
      ys.push_back(std::log(p.value));
    }
  }
  if (xs.size() < std::max<std::size_t>(min_tail, 3)) {
    throw Error(Errc::too_few_tail_points,
                returns.asset_id() + ": " + std::to_string(xs.size()) + " " +
                    (side == TailSide::right ? "right" : "left") + " tail points beyond " +
                    std::to_string(threshold) + " sigma, need " + std::to_string(min_tail));
  }
  const auto fit = stats::ols(xs, ys);
  TailFit out;
  out.side = side;
  out.threshold_sigma = threshold;
  out.exponent = -fit.slope;
  out.intercept = fit.intercept;
  out.n_tail = xs.size();
  out.r_squared = fit.r_squared;
  return out;
}

}  // namespace

TailFit fit_power_tail(const ReturnSeries& norm_returns, TailSide side, double threshold_sigma,
                       std::size_t min_tail) {
  return fit_tail(norm_returns, side, threshold_sigma, min_tail, TailModel::power);
}

TailFit fit_exponential_tail(const ReturnSeries& norm_returns, TailSide side, double threshold_sigma,
                             std::size_t min_tail) {
  return fit_tail(norm_returns, side, threshold_sigma, min_tail, TailModel::exponential);
}

}  // namespace stylized
