#include "stylized/dexarb.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "stylized/error.hpp"
#include "stylized/stats.hpp"

namespace stylized {

FeeTier::FeeTier(double fee_fraction) : fee_(fee_fraction) {
  if (!(fee_fraction > 0.0 && fee_fraction < 0.1)) {
    throw Error(Errc::invalid_argument, "fee fraction must lie in (0, 0.1)");
  }
}

double optimal_pool_price(double pool_price, double ref_price, FeeTier tier) {
  if (!(pool_price > 0.0) || !(ref_price > 0.0)) {
    throw Error(Errc::invalid_argument, "pool and reference prices must be positive");
  }
  const double lower = tier.gamma() * ref_price;
  const double upper = ref_price / tier.gamma();
  if (pool_price > upper) return upper;
  if (pool_price < lower) return lower;
  return pool_price;
}

NoArbBand no_arb_band(const PriceSeries& ref, FeeTier tier) {
  NoArbBand band;
  for (const auto& p : ref.points()) {
    band.timestamps.push_back(p.time);
    band.lower.push_back(tier.gamma() * p.price);
    band.upper.push_back(p.price / tier.gamma());
  }
  return band;
}

std::vector<BandViolation> band_violations(const PriceSeries& pool, const PriceSeries& ref, FeeTier tier) {
  const auto zp = pool.points();
  const auto sp = ref.points();
  std::vector<BandViolation> events;
  std::size_t matched = 0;
  std::size_t j = 0;
  for (const auto& z : zp) {
    while (j < sp.size() && sp[j].time < z.time) ++j;
    if (j == sp.size()) break;
    if (sp[j].time != z.time) continue;
    ++matched;
    const double lower = tier.gamma() * sp[j].price;
    const double upper = sp[j].price / tier.gamma();
    if (z.price > upper) {
      events.push_back({z.time, BandSide::above, z.price / upper - 1.0});
    } else if (z.price < lower) {
      events.push_back({z.time, BandSide::below, z.price / lower - 1.0});
    }
  }
  if (matched == 0) throw Error(Errc::insufficient_data, "pool and reference share no timestamps");
  return events;
}

PriceSeries simulate_arb_pool(const PriceSeries& ref, FeeTier tier, ArbPoolOptions options) {
  const auto sp = ref.points();
  if (sp.empty()) throw Error(Errc::insufficient_data, "empty reference series");
  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<PricePoint> out;
  out.reserve(sp.size());
  double z = sp.front().price;
  for (std::size_t t = 0; t < sp.size(); ++t) {
    const double s = sp[t].price;
    z = optimal_pool_price(z, s, tier);
    if (options.within_band_noise > 0.0) {
      const double moved = z * std::exp(options.within_band_noise * noise(rng));
      z = std::clamp(moved, tier.gamma() * s, s / tier.gamma());
    }
    out.push_back({sp[t].time, z});
  }
  return PriceSeries(ref.asset_id() + ".pool", ref.interval_seconds(), std::move(out));
}

std::size_t count_price_changes(const PriceSeries& series) {
  const auto pts = series.points();
  std::size_t changes = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (pts[i].price != pts[i - 1].price) ++changes;
  }
  return changes;
}

LeadLagCurve lead_lag_xcorr(const ReturnSeries& a, const ReturnSeries& b, int max_lag,
                            LeadLagOptions options) {
  if (max_lag < 0) throw Error(Errc::invalid_argument, "max_lag must be nonnegative");
  const auto ap = a.points();
  const auto bp = b.points();
  std::vector<Timestamp> times;
  std::vector<double> av, bv;
  for (std::size_t i = 0, j = 0; i < ap.size() && j < bp.size();) {
    if (ap[i].time < bp[j].time) {
      ++i;
    } else if (bp[j].time < ap[i].time) {
      ++j;
    } else {
      times.push_back(ap[i].time);
      av.push_back(ap[i].value);
      bv.push_back(bp[j].value);
      ++i;
      ++j;
    }
  }
  if (times.size() < 2) throw Error(Errc::insufficient_data, "series share fewer than 2 timestamps");
  const double sa = stats::population_std(av);
  const double sb = stats::population_std(bv);
  if (!(sa > 0.0) || !(sb > 0.0)) throw Error(Errc::degenerate_series, "zero std in lead-lag input");
  const double ma = options.centered ? stats::mean(av) : 0.0;
  const double mb = options.centered ? stats::mean(bv) : 0.0;

  // Pairs (t, t + k * step) found by timestamp so that gaps are respected.
  const auto step = a.horizon_seconds();
  LeadLagCurve curve;
  for (int k = -max_lag; k <= max_lag; ++k) {
    double sum = 0.0;
    std::size_t count = 0;
    std::size_t j = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Timestamp target = times[i] + static_cast<Timestamp>(k) * step;
      while (j < times.size() && times[j] < target) ++j;
      if (j == times.size()) break;
      if (times[j] == target) {
        sum += (av[i] - ma) * (bv[j] - mb);
        ++count;
      }
    }
    if (count == 0) continue;
    curve.lags.push_back(k);
    curve.values.push_back(sum / static_cast<double>(count) / (sa * sb));
    curve.pair_counts.push_back(count);
    curve.stderr_values.push_back(1.0 / std::sqrt(static_cast<double>(count)));
  }
  return curve;
}

}  // namespace stylized
