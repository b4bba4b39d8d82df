#include "stylized/dependence.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "stylized/error.hpp"
#include "stylized/stats.hpp"

namespace stylized {

std::vector<std::pair<std::size_t, std::size_t>> lagged_pairs(std::span<const Timestamp> times,
                                                              std::int64_t offset) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t j = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    const Timestamp target = times[i] + offset;
    while (j < times.size() && times[j] < target) ++j;
    if (j == times.size()) break;
    if (times[j] == target) out.emplace_back(i, j);
  }
  return out;
}

namespace {

struct PairCorrelation {
  double value = 0.0;
  std::size_t count = 0;
};

/// Correlation of (x[i], y[j]) over the given index pairs; count 0 when the
/// set is empty or degenerate.
PairCorrelation correlate_pairs(std::span<const double> x, std::span<const double> y,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  if (pairs.empty()) return {};
  std::vector<double> left, right;
  left.reserve(pairs.size());
  right.reserve(pairs.size());
  for (auto [i, j] : pairs) {
    left.push_back(x[i]);
    right.push_back(y[j]);
  }
  const double r = stats::pearson(left, right);
  if (std::isnan(r)) return {};
  return {r, pairs.size()};
}

std::optional<double> lookup(const std::vector<int>& lags, const std::vector<double>& values, int lag) {
  const auto it = std::lower_bound(lags.begin(), lags.end(), lag);
  if (it == lags.end() || *it != lag) return std::nullopt;
  return values[static_cast<std::size_t>(it - lags.begin())];
}

}  // namespace

std::optional<double> AcfResult::scaled_at(int lag) const { return lookup(lags, scaled_values, lag); }

std::optional<double> AcfResult::value_at(int lag) const { return lookup(lags, values, lag); }

AcfResult session_acf(const ReturnSeries& returns, const SessionCalendar& calendar, int max_lag,
                      std::int64_t lag_unit_seconds) {
  if (max_lag < 1) throw Error(Errc::invalid_argument, "max_lag must be at least 1");
  if (returns.empty()) throw Error(Errc::insufficient_data, "session_acf of an empty series");
  const auto unit = lag_unit_seconds > 0 ? lag_unit_seconds : returns.horizon_seconds();
  const auto in_session = session_filter(returns, calendar);
  const auto times = in_session.times();
  const auto values = in_session.values();

  AcfResult acf;
  for (int k = 1; k <= max_lag; ++k) {
    const auto pairs = lagged_pairs(times, static_cast<std::int64_t>(k) * unit);
    const auto c = correlate_pairs(values, values, pairs);
    if (c.count == 0) continue;
    acf.lags.push_back(k);
    acf.values.push_back(c.value);
    acf.pair_counts.push_back(c.count);
    acf.scaled_values.push_back(c.value * std::sqrt(static_cast<double>(c.count)));
  }
  if (acf.lags.empty()) {
    throw Error(Errc::insufficient_data, returns.asset_id() + ": no lag has a usable pair set");
  }
  return acf;
}

AcfSummary acf_summary(const AcfResult& acf) {
  std::vector<int> missing;
  for (int lag : {1, 24}) {
    if (!acf.scaled_at(lag)) missing.push_back(lag);
  }
  double else_sum = 0.0;
  int else_count = 0;
  for (int lag = 2; lag <= 96; ++lag) {
    if (lag == 24) continue;
    if (const auto v = acf.scaled_at(lag)) {
      else_sum += *v;
      ++else_count;
    }
  }
  if (!missing.empty() || else_count == 0) {
    std::string msg = "acf_summary: missing lags";
    for (int lag : missing) msg += " " + std::to_string(lag);
    if (else_count == 0) msg += " 2..96";
    throw Error(Errc::missing_lags, msg);
  }
  return {(*acf.scaled_at(1) + *acf.scaled_at(24)) / 2.0, else_sum / else_count};
}

VolClusterFit vol_cluster_fit(const ReturnSeries& returns, const SessionCalendar& calendar,
                              int min_lag, int max_lag, double min_scaled) {
  if (min_lag < 1 || max_lag < min_lag) throw Error(Errc::invalid_argument, "bad lag range");
  VolClusterFit fit;
  fit.abs_acf = session_acf(absolute(returns), calendar, max_lag);
  std::vector<double> x, y;
  for (std::size_t i = 0; i < fit.abs_acf.lags.size(); ++i) {
    const int lag = fit.abs_acf.lags[i];
    if (lag < min_lag) continue;
    if (!(fit.abs_acf.values[i] > 0.0)) {
      ++fit.excluded_nonpositive;
    } else if (!(fit.abs_acf.scaled_values[i] > min_scaled)) {
      ++fit.excluded_insignificant;
    } else {
      x.push_back(std::log10(static_cast<double>(lag)));
      y.push_back(std::log10(fit.abs_acf.values[i]));
    }
  }
  fit.used_lags = x.size();
  if (x.size() < kMinVolClusterLags) {
    throw Error(Errc::too_few_lags, returns.asset_id() + ": " + std::to_string(x.size()) +
                                        " usable absolute-return ACF lags, need " +
                                        std::to_string(kMinVolClusterLags));
  }
  const auto ols = stats::ols(x, y);
  fit.slope = ols.slope;
  fit.intercept = ols.intercept;
  fit.slope_stderr = ols.slope_stderr;
  fit.r_squared = ols.r_squared;
  return fit;
}

LeverageCurve leverage(const ReturnSeries& returns, int max_lag) {
  if (max_lag < 1) throw Error(Errc::invalid_argument, "max_lag must be at least 1");
  if (returns.size() <= 2 * static_cast<std::size_t>(max_lag)) {
    throw Error(Errc::insufficient_data, returns.asset_id() + ": leverage needs more than 2K returns");
  }
  const auto times = returns.times();
  const auto values = returns.values();
  std::vector<double> abs_values(values.size());
  std::transform(values.begin(), values.end(), abs_values.begin(), [](double v) { return std::abs(v); });
  if (!(stats::population_std(values) > 0.0) || !(stats::population_std(abs_values) > 0.0)) {
    throw Error(Errc::degenerate_series, returns.asset_id() + ": zero std in leverage");
  }

  LeverageCurve curve;
  auto add = [&](int k) {
    const std::int64_t offset = static_cast<std::int64_t>(std::abs(k)) * returns.horizon_seconds();
    const auto pairs = lagged_pairs(times, offset);
    const auto c = k > 0 ? correlate_pairs(abs_values, values, pairs)
                         : correlate_pairs(values, abs_values, pairs);
    if (c.count == 0) return;
    curve.lags.push_back(k);
    curve.values.push_back(c.value);
    curve.pair_counts.push_back(c.count);
    curve.scaled_values.push_back(c.value * std::sqrt(static_cast<double>(c.count)));
  };
  for (int k = -max_lag; k <= -1; ++k) add(k);
  for (int k = 1; k <= max_lag; ++k) add(k);
  return curve;
}

LeverageSummary leverage_summary(const LeverageCurve& curve) {
  double neg = 0.0, pos = 0.0;
  int n_neg = 0, n_pos = 0;
  for (std::size_t i = 0; i < curve.lags.size(); ++i) {
    if (curve.lags[i] < 0) {
      neg += curve.scaled_values[i];
      ++n_neg;
    } else {
      pos += curve.scaled_values[i];
      ++n_pos;
    }
  }
  if (n_neg == 0 || n_pos == 0) {
    throw Error(Errc::insufficient_data, "leverage curve lacks one branch");
  }
  return {neg / n_neg, pos / n_pos};
}

DailyVolatility daily_volatility(const ReturnSeries& intraday_returns, const SessionCalendar& calendar,
                                 std::size_t min_intraday) {
  DailyVolatility out;
  const auto h = intraday_returns.horizon_seconds();
  std::vector<double> bucket;
  std::int64_t current = 0;
  auto flush = [&] {
    if (bucket.size() >= std::max<std::size_t>(min_intraday, 2)) {
      double total = 0.0;
      for (double v : bucket) total += v;
      out.days.push_back(current);
      out.abs_return.push_back(std::abs(total));
      out.intraday_std.push_back(stats::sample_std(bucket));
    }
    bucket.clear();
  };
  for (const auto& p : intraday_returns.points()) {
    const auto day = calendar.day_of(p.time - h, p.time);
    if (!day) continue;
    if (!bucket.empty() && *day != current) flush();
    current = *day;
    bucket.push_back(p.value);
  }
  flush();
  return out;
}

namespace {

double shifted_corr(std::span<const double> abs_r, std::span<const double> s, int k) {
  const auto d = abs_r.size();
  const auto shift = static_cast<std::size_t>(std::abs(k));
  const auto n = d - shift;
  // k > 0 pairs |R_d| with s_{d+k}; k < 0 pairs |R_d| with s_{d-|k|}.
  const auto x = k > 0 ? abs_r.subspan(0, n) : abs_r.subspan(shift, n);
  const auto y = k > 0 ? s.subspan(shift, n) : s.subspan(0, n);
  return stats::pearson(x, y);
}

TraResult tra_from(std::span<const double> abs_r, std::span<const double> s, int max_n) {
  TraResult out;
  out.n_days = abs_r.size();
  double delta = 0.0;
  for (int k = 1; k <= max_n; ++k) {
    const double cp = shifted_corr(abs_r, s, k);
    const double cn = shifted_corr(abs_r, s, -k);
    if (std::isnan(cp) || std::isnan(cn)) {
      throw Error(Errc::degenerate_series, "time-reversal correlation on constant data");
    }
    delta += cp - cn;
    out.lags.push_back(k);
    out.c_pos.push_back(cp);
    out.c_neg.push_back(cn);
    out.delta.push_back(delta);
  }
  return out;
}

}  // namespace

TraResult tra(const DailyVolatility& days, int max_n) {
  if (max_n < 1) throw Error(Errc::invalid_argument, "max_N must be at least 1");
  if (days.days.size() < kMinTraDays || days.days.size() <= static_cast<std::size_t>(max_n) + 2) {
    throw Error(Errc::insufficient_data, std::to_string(days.days.size()) +
                                             " complete days for TRA, need " +
                                             std::to_string(kMinTraDays));
  }
  return tra_from(days.abs_return, days.intraday_std, max_n);
}

TraResult tra(const ReturnSeries& intraday_returns, const SessionCalendar& calendar, int max_n) {
  return tra(daily_volatility(intraday_returns, calendar), max_n);
}

std::vector<double> tra_bootstrap_stderr(const DailyVolatility& days, int max_n, int trials,
                                         std::size_t block_length, std::uint64_t seed) {
  const auto d = days.days.size();
  if (d < kMinTraDays || trials < 2 || block_length == 0 || block_length > d) {
    throw Error(Errc::invalid_argument, "tra_bootstrap_stderr: bad arguments");
  }
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> start(0, d - block_length);
  std::vector<double> sum(static_cast<std::size_t>(max_n), 0.0);
  std::vector<double> sum_sq(sum.size(), 0.0);
  std::vector<double> abs_r(d), s(d);
  for (int t = 0; t < trials; ++t) {
    for (std::size_t filled = 0; filled < d;) {
      const auto b = start(rng);
      for (std::size_t i = 0; i < block_length && filled < d; ++i, ++filled) {
        abs_r[filled] = days.abs_return[b + i];
        s[filled] = days.intraday_std[b + i];
      }
    }
    const auto r = tra_from(abs_r, s, max_n);
    for (std::size_t k = 0; k < sum.size(); ++k) {
      sum[k] += r.delta[k];
      sum_sq[k] += r.delta[k] * r.delta[k];
    }
  }
  std::vector<double> out(sum.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double m = sum[k] / trials;
    out[k] = std::sqrt(std::max(0.0, (sum_sq[k] - trials * m * m) / (trials - 1)));
  }
  return out;
}

}  // namespace stylized
