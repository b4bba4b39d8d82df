#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

// Small numerical helpers shared by the statistics modules.
namespace stylized::stats {

[[nodiscard]] double mean(std::span<const double> x);

/// Standard deviation with the n-1 denominator.
[[nodiscard]] double sample_std(std::span<const double> x);

/// Standard deviation with the n denominator.
[[nodiscard]] double population_std(std::span<const double> x);

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  // population (1/n)
  double skewness = 0.0;  // m3 / m2^1.5
  double kurtosis = 0.0;  // m4 / m2^2, non-excess
};

[[nodiscard]] Moments central_moments(std::span<const double> x);

/// Pearson correlation over paired samples, using per-set means and
/// population standard deviations so that |r| <= 1 always holds.
/// Returns nullopt-like NaN when either side has zero variance.
[[nodiscard]] double pearson(std::span<const double> x, std::span<const double> y);

struct OlsFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double intercept_stderr = 0.0;
  double r_squared = 0.0;
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Requires n >= 2 and
/// non-constant x.
[[nodiscard]] OlsFit ols(std::span<const double> x, std::span<const double> y);

/// Survival function of the chi-square distribution with two degrees of freedom.
[[nodiscard]] double chi2_df2_sf(double x) noexcept;

}  // namespace stylized::stats
