#pragma once

#include <cstdint>
#include <vector>

#include "stylized/timeseries.hpp"

namespace stylized {

/// Pool fee. gamma = 1 - fee is the fraction of the input that trades.
class FeeTier {
 public:
  /// Throws invalid_argument unless 0 < fee < 0.1.
  explicit FeeTier(double fee_fraction);

  [[nodiscard]] static FeeTier bp30() { return FeeTier(0.003); }
  [[nodiscard]] static FeeTier bp5() { return FeeTier(0.0005); }

  [[nodiscard]] double fee() const noexcept { return fee_; }
  [[nodiscard]] double gamma() const noexcept { return 1.0 - fee_; }

 private:
  double fee_;
};

/// Projects the pool price onto [gamma S, S / gamma].
[[nodiscard]] double optimal_pool_price(double pool_price, double ref_price, FeeTier tier);

struct NoArbBand {
  std::vector<Timestamp> timestamps;
  std::vector<double> lower;
  std::vector<double> upper;
};

[[nodiscard]] NoArbBand no_arb_band(const PriceSeries& ref, FeeTier tier);

enum class BandSide { above, below };

struct BandViolation {
  Timestamp time = 0;
  BandSide side = BandSide::above;
  double excess = 0.0;  // relative distance past the nearer boundary, signed
};

/// Events where the pool lies strictly outside the band, on timestamps common
/// to both series. Throws insufficient_data when no timestamp matches.
[[nodiscard]] std::vector<BandViolation> band_violations(const PriceSeries& pool,
                                                         const PriceSeries& ref, FeeTier tier);

struct ArbPoolOptions {
  /// Log-scale std of optional noise trades; 0 disables them. Noise moves are
  /// clipped to the band, so the pool never leaves it.
  double within_band_noise = 0.0;
  std::uint64_t seed = 0;
};

/// Z_0 = S_0, Z_t = optimal_pool_price(Z_{t-1}, S_t): a pool traded only by
/// arbitrageurs.
[[nodiscard]] PriceSeries simulate_arb_pool(const PriceSeries& ref, FeeTier tier,
                                            ArbPoolOptions options = {});

/// Number of observations where the price differs from the previous one.
[[nodiscard]] std::size_t count_price_changes(const PriceSeries& series);

struct LeadLagCurve {
  std::vector<int> lags;
  std::vector<double> values;
  std::vector<std::size_t> pair_counts;
  std::vector<double> stderr_values;  // 1 / sqrt(N)
};

struct LeadLagOptions {
  /// Subtract full-sample means before multiplying.
  bool centered = false;
};

/// E[a(t) b(t + k)] / (sigma_a sigma_b) for k in [-K, K] on timestamps shared
/// by both series; a lag step equals a's horizon. Positive-k peaks mean `a`
/// leads `b`.
[[nodiscard]] LeadLagCurve lead_lag_xcorr(const ReturnSeries& a, const ReturnSeries& b,
                                          int max_lag, LeadLagOptions options = {});

}  // namespace stylized
