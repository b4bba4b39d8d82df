#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace stylized {

class SessionCalendar;

/// UTC epoch seconds.
using Timestamp = std::int64_t;

struct PricePoint {
  Timestamp time = 0;
  double price = 0.0;
};

struct ReturnPoint {
  Timestamp time = 0;
  double value = 0.0;
};

/// Prices sampled on a fixed grid. Timestamps are strictly increasing and
/// share a common phase modulo the interval; prices are strictly positive.
/// Missing grid points are allowed (gaps are never filled).
class PriceSeries {
 public:
  PriceSeries() = default;
  PriceSeries(std::string asset_id, std::int64_t interval_seconds,
              std::vector<PricePoint> points);

  [[nodiscard]] const std::string& asset_id() const noexcept { return asset_id_; }
  [[nodiscard]] std::int64_t interval_seconds() const noexcept { return interval_seconds_; }
  [[nodiscard]] std::span<const PricePoint> points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] std::vector<double> prices() const;

  /// Points with from <= time < to.
  [[nodiscard]] PriceSeries window(Timestamp from, Timestamp to) const;

 private:
  std::string asset_id_;
  std::int64_t interval_seconds_ = 1;
  std::vector<PricePoint> points_;
};

/// Log-returns stamped at the end of their horizon.
class ReturnSeries {
 public:
  ReturnSeries() = default;
  ReturnSeries(std::string asset_id, std::int64_t horizon_seconds,
               std::vector<ReturnPoint> points);

  [[nodiscard]] const std::string& asset_id() const noexcept { return asset_id_; }
  [[nodiscard]] std::int64_t horizon_seconds() const noexcept { return horizon_seconds_; }
  [[nodiscard]] std::span<const ReturnPoint> points() const noexcept { return points_; }
  [[nodiscard]] std::size_t size() const noexcept { return points_.size(); }
  [[nodiscard]] bool empty() const noexcept { return points_.empty(); }
  [[nodiscard]] std::vector<double> values() const;
  [[nodiscard]] std::vector<Timestamp> times() const;

  [[nodiscard]] bool normalized() const noexcept { return normalized_; }
  [[nodiscard]] double norm_mean() const noexcept { return norm_mean_; }
  [[nodiscard]] double norm_std() const noexcept { return norm_std_; }

  /// Same timestamps, new values. Drops the normalization record.
  [[nodiscard]] ReturnSeries with_values(std::span<const double> values) const;

 private:
  friend ReturnSeries normalize(const ReturnSeries& returns);

  std::string asset_id_;
  std::int64_t horizon_seconds_ = 1;
  std::vector<ReturnPoint> points_;
  bool normalized_ = false;
  double norm_mean_ = 0.0;
  double norm_std_ = 1.0;
};

/// ln(p(T)) - ln(p(T - horizon)) for every pair of observations exactly one
/// horizon apart. Throws insufficient_data when no pair exists.
[[nodiscard]] ReturnSeries log_returns(const PriceSeries& series, std::int64_t horizon_seconds);

/// z-score with the full-sample mean and n-1 standard deviation.
[[nodiscard]] ReturnSeries normalize(const ReturnSeries& returns);

/// |x| elementwise.
[[nodiscard]] ReturnSeries absolute(const ReturnSeries& returns);

/// Fraction of values with |x| <= tolerance.
[[nodiscard]] double zero_fraction(const ReturnSeries& returns, double tolerance = 0.0);

/// Keeps returns whose interval [T - horizon, T] lies inside a single session.
[[nodiscard]] ReturnSeries session_filter(const ReturnSeries& returns,
                                          const SessionCalendar& calendar);

/// Sets exactly round(rate * n) positions, drawn uniformly without replacement,
/// to zero. Deterministic for a given seed.
[[nodiscard]] ReturnSeries random_zero_replacement(const ReturnSeries& returns, double rate,
                                                   std::uint64_t seed);

/// Last observed price in each bucket of the target interval, stamped at the
/// bucket start (buckets are aligned to epoch 0). Empty buckets are omitted.
[[nodiscard]] PriceSeries resample_last(const PriceSeries& series, std::int64_t interval_seconds);

}  // namespace stylized
