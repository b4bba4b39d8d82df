#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "stylized/calendar.hpp"
#include "stylized/timeseries.hpp"

namespace stylized {

/// Index pairs (i, j) with times[j] - times[i] == offset. `times` must be
/// strictly increasing; offset may be negative.
[[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> lagged_pairs(
    std::span<const Timestamp> times, std::int64_t offset);

/// Per-lag correlation over the pair set I_k, with per-set means and
/// (population) standard deviations, and the same value times sqrt(N).
struct AcfResult {
  std::vector<int> lags;
  std::vector<double> values;
  std::vector<std::size_t> pair_counts;
  std::vector<double> scaled_values;

  [[nodiscard]] std::optional<double> scaled_at(int lag) const;
  [[nodiscard]] std::optional<double> value_at(int lag) const;
};

/// Session-aware autocorrelation. Returns outside the calendar's sessions are
/// discarded first; lag k pairs R_t with R_{t + k * lag_unit}. Lags whose pair
/// set is empty or degenerate are omitted. `lag_unit_seconds` defaults to the
/// return horizon.
[[nodiscard]] AcfResult session_acf(const ReturnSeries& returns, const SessionCalendar& calendar,
                                    int max_lag = 96, std::int64_t lag_unit_seconds = 0);

struct AcfSummary {
  double avg_1_24 = 0.0;  // mean scaled value at lags 1 and 24
  double avg_else = 0.0;  // mean scaled value over lags 2..96 except 24
};

/// Throws missing_lags naming every absent lag in 1..96.
[[nodiscard]] AcfSummary acf_summary(const AcfResult& acf);

struct VolClusterFit {
  double slope = 0.0;
  double intercept = 0.0;  // log10 ACF at lag 1 on the fitted line
  double slope_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t used_lags = 0;
  std::size_t excluded_nonpositive = 0;
  std::size_t excluded_insignificant = 0;
  AcfResult abs_acf;
};

inline constexpr std::size_t kMinVolClusterLags = 10;

/// OLS of log10 ACF(|R|) on log10 lag. Lags with nonpositive ACF are dropped,
/// as are lags whose scaled value does not exceed `min_scaled` (the +3
/// significance line; pass 0 to keep every positive lag).
[[nodiscard]] VolClusterFit vol_cluster_fit(const ReturnSeries& returns,
                                            const SessionCalendar& calendar, int min_lag = 1,
                                            int max_lag = 96, double min_scaled = 3.0);

/// L(k) * sqrt(N) for k in [-K, -1] and [1, K].
///   k > 0: corr(|R_t|, R_{t+k})   (past volatility -> future return)
///   k < 0: corr(R_t, |R_{t+|k|}|) (past return -> future volatility)
/// The leverage effect shows up as negative values on the k < 0 branch.
struct LeverageCurve {
  std::vector<int> lags;
  std::vector<double> values;
  std::vector<double> scaled_values;
  std::vector<std::size_t> pair_counts;
};

[[nodiscard]] LeverageCurve leverage(const ReturnSeries& returns, int max_lag = 96);

struct LeverageSummary {
  double avg_neg = 0.0;
  double avg_pos = 0.0;
};

/// Means of the scaled values on each branch.
[[nodiscard]] LeverageSummary leverage_summary(const LeverageCurve& curve);

/// Day-level quantities for the time-reversal measure.
struct DailyVolatility {
  std::vector<std::int64_t> days;
  std::vector<double> abs_return;    // |open-to-close log-return|
  std::vector<double> intraday_std;  // n-1 std of the day's returns
};

inline constexpr std::size_t kMinIntradayReturns = 6;
inline constexpr std::size_t kMinTraDays = 60;

/// Groups returns into trading days (UTC days for always-open calendars,
/// sessions otherwise). Days with fewer than `min_intraday` returns are dropped.
[[nodiscard]] DailyVolatility daily_volatility(const ReturnSeries& intraday_returns,
                                               const SessionCalendar& calendar,
                                               std::size_t min_intraday = kMinIntradayReturns);

struct TraResult {
  std::vector<int> lags;       // 1..max_N
  std::vector<double> c_pos;   // C(k)
  std::vector<double> c_neg;   // C(-k)
  std::vector<double> delta;   // Delta(N)
  std::size_t n_days = 0;

  [[nodiscard]] double initial() const { return delta.front(); }
  [[nodiscard]] double final() const { return delta.back(); }
  /// Delta(max_N) > Delta(1).
  [[nodiscard]] bool asymmetric() const { return final() > initial(); }
};

/// C(k) = corr(|R_d|, s_{d+k}) over consecutive trading days and the
/// cumulative difference Delta(N) = sum_{k<=N} C(k) - C(-k).
[[nodiscard]] TraResult tra(const DailyVolatility& days, int max_n = 20);
[[nodiscard]] TraResult tra(const ReturnSeries& intraday_returns, const SessionCalendar& calendar,
                            int max_n = 20);

/// Moving-block bootstrap standard error of Delta(N), N = 1..max_N.
[[nodiscard]] std::vector<double> tra_bootstrap_stderr(const DailyVolatility& days, int max_n,
                                                       int trials, std::size_t block_length,
                                                       std::uint64_t seed);

}  // namespace stylized
