#include "stylized/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "stylized/calendar.hpp"
#include "stylized/error.hpp"
#include "stylized/stats.hpp"

namespace stylized {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

}  // namespace

PriceSeries::PriceSeries(std::string asset_id, std::int64_t interval_seconds,
                         std::vector<PricePoint> points)
    : asset_id_(std::move(asset_id)), interval_seconds_(interval_seconds), points_(std::move(points)) {
  if (interval_seconds_ <= 0) {
    throw Error(Errc::invalid_argument, "interval_seconds must be positive");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!(p.price > 0.0) || !std::isfinite(p.price)) {
      throw Error(Errc::invalid_argument, asset_id_ + ": non-positive price at t=" +
                                              std::to_string(p.time));
    }
    if (i == 0) continue;
    if (p.time <= points_[i - 1].time) {
      throw Error(Errc::invalid_argument, asset_id_ + ": timestamps not strictly increasing at t=" +
                                              std::to_string(p.time));
    }
    if (floor_mod(p.time - points_.front().time, interval_seconds_) != 0) {
      throw Error(Errc::invalid_argument, asset_id_ + ": timestamp off the sampling grid at t=" +
                                              std::to_string(p.time));
    }
  }
}

std::vector<double> PriceSeries::prices() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.price);
  return out;
}

PriceSeries PriceSeries::window(Timestamp from, Timestamp to) const {
  std::vector<PricePoint> kept;
  for (const auto& p : points_) {
    if (p.time >= from && p.time < to) kept.push_back(p);
  }
  return PriceSeries(asset_id_, interval_seconds_, std::move(kept));
}

ReturnSeries::ReturnSeries(std::string asset_id, std::int64_t horizon_seconds,
                           std::vector<ReturnPoint> points)
    : asset_id_(std::move(asset_id)), horizon_seconds_(horizon_seconds), points_(std::move(points)) {
  if (horizon_seconds_ <= 0) {
    throw Error(Errc::invalid_argument, "horizon_seconds must be positive");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!std::isfinite(points_[i].value)) {
      throw Error(Errc::invalid_argument, asset_id_ + ": non-finite return");
    }
    if (i > 0 && points_[i].time <= points_[i - 1].time) {
      throw Error(Errc::invalid_argument, asset_id_ + ": return timestamps not strictly increasing");
    }
  }
}

std::vector<double> ReturnSeries::values() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.value);
  return out;
}

std::vector<Timestamp> ReturnSeries::times() const {
  std::vector<Timestamp> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.time);
  return out;
}

ReturnSeries ReturnSeries::with_values(std::span<const double> values) const {
  if (values.size() != points_.size()) {
    throw Error(Errc::invalid_argument, "with_values: size mismatch");
  }
  std::vector<ReturnPoint> pts(points_.size());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = {points_[i].time, values[i]};
  return ReturnSeries(asset_id_, horizon_seconds_, std::move(pts));
}

ReturnSeries log_returns(const PriceSeries& series, std::int64_t horizon_seconds) {
  const auto interval = series.interval_seconds();
  if (horizon_seconds <= 0 || horizon_seconds % interval != 0) {
    throw Error(Errc::invalid_argument, "horizon " + std::to_string(horizon_seconds) +
                                            "s is not a positive multiple of the " +
                                            std::to_string(interval) + "s interval");
  }
  const auto pts = series.points();
  std::vector<ReturnPoint> out;
  std::size_t i = 0;
  for (std::size_t j = 0; j < pts.size(); ++j) {
    const Timestamp target = pts[j].time - horizon_seconds;
    while (i < j && pts[i].time < target) ++i;
    if (i < j && pts[i].time == target) {
      out.push_back({pts[j].time, std::log(pts[j].price) - std::log(pts[i].price)});
    }
  }
  if (out.empty()) {
    throw Error(Errc::insufficient_data, series.asset_id() + ": no price pairs " +
                                             std::to_string(horizon_seconds) + "s apart");
  }
  return ReturnSeries(series.asset_id(), horizon_seconds, std::move(out));
}

ReturnSeries normalize(const ReturnSeries& returns) {
  if (returns.size() < 2) {
    throw Error(Errc::insufficient_data, "normalize needs at least 2 returns");
  }
  const auto v = returns.values();
  const double m = stats::mean(v);
  const double s = stats::sample_std(v);
  if (!(s > 0.0)) throw Error(Errc::degenerate_series, returns.asset_id() + ": zero std");
  std::vector<double> z(v.size());
  std::transform(v.begin(), v.end(), z.begin(), [&](double x) { return (x - m) / s; });
  ReturnSeries out = returns.with_values(z);
  out.normalized_ = true;
  out.norm_mean_ = m;
  out.norm_std_ = s;
  return out;
}

ReturnSeries absolute(const ReturnSeries& returns) {
  auto v = returns.values();
  for (double& x : v) x = std::abs(x);
  return returns.with_values(v);
}

double zero_fraction(const ReturnSeries& returns, double tolerance) {
  if (returns.empty()) throw Error(Errc::insufficient_data, "zero_fraction of an empty series");
  if (tolerance < 0.0) throw Error(Errc::invalid_argument, "negative zero tolerance");
  const auto pts = returns.points();
  const auto zeros = std::count_if(pts.begin(), pts.end(),
                                   [&](const ReturnPoint& p) { return std::abs(p.value) <= tolerance; });
  return static_cast<double>(zeros) / static_cast<double>(pts.size());
}

ReturnSeries session_filter(const ReturnSeries& returns, const SessionCalendar& calendar) {
  if (calendar.is_always_open()) return returns;
  std::vector<ReturnPoint> kept;
  for (const auto& p : returns.points()) {
    if (calendar.contains(p.time - returns.horizon_seconds(), p.time)) kept.push_back(p);
  }
  return ReturnSeries(returns.asset_id(), returns.horizon_seconds(), std::move(kept));
}

ReturnSeries random_zero_replacement(const ReturnSeries& returns, double rate, std::uint64_t seed) {
  if (!(rate >= 0.0 && rate <= 1.0)) {
    throw Error(Errc::invalid_argument, "replacement rate must lie in [0, 1]");
  }
  const std::size_t n = returns.size();
  const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates: the first k slots end up as a uniform k-subset.
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  auto v = returns.values();
  for (std::size_t i = 0; i < k; ++i) v[idx[i]] = 0.0;
  return returns.with_values(v);
}

PriceSeries resample_last(const PriceSeries& series, std::int64_t interval_seconds) {
  const auto source = series.interval_seconds();
  if (interval_seconds < source) {
    throw Error(Errc::invalid_argument, "target interval is smaller than the source interval");
  }
  if (interval_seconds % source != 0) {
    throw Error(Errc::invalid_argument, "target interval is not a multiple of the source interval");
  }
  if (interval_seconds == source) return series;
  std::vector<PricePoint> out;
  for (const auto& p : series.points()) {
    const Timestamp bucket = floor_div(p.time, interval_seconds) * interval_seconds;
    if (!out.empty() && out.back().time == bucket) {
      out.back().price = p.price;
    } else {
      out.push_back({bucket, p.price});
    }
  }
  return PriceSeries(series.asset_id(), interval_seconds, std::move(out));
}

}  // namespace stylized
