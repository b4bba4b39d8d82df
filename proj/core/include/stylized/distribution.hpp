#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "stylized/timeseries.hpp"

namespace stylized {

struct JarqueBera {
  double statistic = 0.0;
  double p_value = 1.0;
  double skewness = 0.0;
  double kurtosis = 0.0;  // non-excess
};

/// JB = n/6 (s^2 + (k - 3)^2 / 4) with population-moment skewness and
/// kurtosis; p-value from the chi-square(2) survival function.
/// Requires n >= 8 and nonzero variance.
[[nodiscard]] JarqueBera jarque_bera(std::span<const double> values);

struct JbScanPoint {
  double horizon_days = 0.0;
  std::int64_t horizon_seconds = 0;
  std::size_t n_returns = 0;
  double statistic = 0.0;
  double p_value = 1.0;
};

struct JbScan {
  /// chi-square(2) 95% quantile.
  static constexpr double critical_value_95 = 5.991;

  std::vector<JbScanPoint> points;      // usable horizons, increasing
  std::vector<double> dropped_horizons;  // in days
  double slope = 0.0;                   // log10 JB against log10 days
  double slope_stderr = 0.0;
  double intercept = 0.0;

  [[nodiscard]] std::vector<double> horizons_days() const;
  [[nodiscard]] std::vector<double> jb_values() const;
  [[nodiscard]] bool has_dropped() const noexcept { return !dropped_horizons.empty(); }
};

/// 1h, 4h, 12h, 1d, 2d, 4d, 7d, 14d, 30d.
[[nodiscard]] std::vector<double> default_jb_horizons();

/// Non-overlapping log-returns at one horizon, chained greedily from the
/// first observation. A missing right endpoint restarts the chain at the next
/// available price.
[[nodiscard]] std::vector<double> non_overlapping_returns(const PriceSeries& prices,
                                                          std::int64_t horizon_seconds);

/// JB per horizon and an OLS fit of log10 JB on log10 horizon (days).
/// Horizons with fewer than 8 returns or degenerate data are dropped;
/// fewer than 3 usable horizons throws insufficient_data.
[[nodiscard]] JbScan jb_scan(const PriceSeries& prices,
                             std::span<const double> horizons_days);
[[nodiscard]] JbScan jb_scan(const PriceSeries& prices);

struct MountainPoint {
  double x = 0.0;
  double value = 0.0;
};

/// Both tails of the empirical CDF on the positive axis:
///   right: 1 - F(x) at every distinct sample point x >= 0
///   left:  F(x) at every distinct sample point x < 0, plotted at -x
/// Both branches are sorted by increasing x.
struct MountainCdf {
  std::vector<MountainPoint> right;
  std::vector<MountainPoint> left;
};

[[nodiscard]] MountainCdf mountain_cdf(std::span<const double> values);
[[nodiscard]] MountainCdf mountain_cdf(const ReturnSeries& norm_returns);

enum class TailSide { left, right };

struct TailFit {
  TailSide side = TailSide::right;
  double threshold_sigma = 2.0;
  double exponent = 0.0;  // alpha for the power fit, eta for the exponential fit
  double intercept = 0.0;
  std::size_t n_tail = 0;
  double r_squared = 0.0;
};

inline constexpr std::size_t kMinTailPoints = 30;

/// OLS of ln(tail CDF) on ln|x| over mountain points beyond the threshold;
/// exponent = -slope. Values are used as given, so the threshold is in units
/// of the input (standard deviations for normalized returns). Points whose
/// tail value is zero are skipped.
[[nodiscard]] TailFit fit_power_tail(const ReturnSeries& norm_returns, TailSide side,
                                     double threshold_sigma = 2.0,
                                     std::size_t min_tail = kMinTailPoints);

/// OLS of ln(tail CDF) on |x|; exponent = -slope.
[[nodiscard]] TailFit fit_exponential_tail(const ReturnSeries& norm_returns, TailSide side,
                                           double threshold_sigma = 2.0,
                                           std::size_t min_tail = kMinTailPoints);

}  // namespace stylized
