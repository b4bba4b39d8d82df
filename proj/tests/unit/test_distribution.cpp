#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "check.hpp"
#include "oracles.hpp"
#include "stylized/distribution.hpp"
#include "synth.hpp"

using namespace stylized;

TEST_CASE("alternating signs give the hand-computed JB value") {
  std::vector<double> v(100);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i % 2 == 0 ? 1.0 : -1.0;
  const auto jb = jarque_bera(v);
  CHECK(jb.skewness == 0.0);
  CHECK(jb.kurtosis == 1.0);
  CHECK(jb.statistic == doctest::Approx(100.0 / 6.0).epsilon(1e-15));
  CHECK(jb.p_value == doctest::Approx(std::exp(-jb.statistic / 2.0)));
}

TEST_CASE("JB agrees with the direct formula") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto v = synth::student_t(500, 5.0, seed);
    CHECK(jarque_bera(v).statistic == doctest::Approx(oracle::jarque_bera(v)).epsilon(1e-10));
  }
}

TEST_CASE("JB input checks") {
  CHECK_ERRC(jarque_bera(std::vector<double>(7, 1.0)), Errc::insufficient_data);
  CHECK_ERRC(jarque_bera(std::vector<double>(20, 1.0)), Errc::degenerate_series);
}

TEST_CASE("mountain CDF matches counting at every point") {
  auto v = synth::gaussian(400, 11);
  for (auto& x : v) x = std::round(x * 10.0) / 10.0;  // force ties
  const auto m = mountain_cdf(v);
  for (const auto& p : m.right) CHECK(p.value == doctest::Approx(oracle::tail_probability(v, p.x, true)));
  for (const auto& p : m.left) CHECK(p.value == doctest::Approx(oracle::tail_probability(v, p.x, false)));
  CHECK(std::is_sorted(m.right.begin(), m.right.end(), [](auto a, auto b) { return a.x < b.x; }));
  CHECK(std::is_sorted(m.left.begin(), m.left.end(), [](auto a, auto b) { return a.x < b.x; }));
  for (std::size_t i = 1; i < m.right.size(); ++i) CHECK(m.right[i].value <= m.right[i - 1].value);
  for (std::size_t i = 1; i < m.left.size(); ++i) CHECK(m.left[i].value <= m.left[i - 1].value);
}

TEST_CASE("power tail recovers a Pareto exponent") {
  const auto r = normalize(synth::as_returns(synth::pareto_symmetric(100000, 3.0, 5)));
  const auto right = fit_power_tail(r, TailSide::right);
  const auto left = fit_power_tail(r, TailSide::left);
  CHECK(right.exponent == doctest::Approx(3.0).epsilon(0.1));
  CHECK(left.exponent == doctest::Approx(3.0).epsilon(0.1));
  CHECK(right.r_squared > 0.95);
}

TEST_CASE("exponential tail recovers the Laplace rate on the input scale") {
  const auto r = synth::as_returns(synth::laplace(100000, 1.0, 2));
  const auto fit = fit_exponential_tail(r, TailSide::right);
  CHECK(fit.exponent == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("tail fit needs enough points") {
  const auto r = normalize(synth::as_returns(synth::gaussian(100, 1)));
  const auto caught = testkit::catch_error([&] { (void)fit_power_tail(r, TailSide::right); });
  CHECK(caught.code == Errc::too_few_tail_points);
  CHECK(caught.message.find("right") != std::string::npos);
}

TEST_CASE("non-overlapping returns chain through gaps") {
  const auto p = synth::as_prices(synth::gaussian(100, 3, 0.01));
  CHECK(non_overlapping_returns(p, 3600).size() == 100);
  CHECK(non_overlapping_returns(p, 4 * 3600).size() == 25);

  std::vector<PricePoint> pts(p.points().begin(), p.points().end());
  pts.erase(pts.begin() + 16);
  const PriceSeries gappy("X", 3600, pts);
  // 0 -> 8, then hour 16 is missing so the chain restarts at 9: 9 -> 17 -> ... -> 97.
  const auto r = non_overlapping_returns(gappy, 8 * 3600);
  CHECK(r.size() == 12);
}

TEST_CASE("JB scan separates fat tails from Gaussian data") {
  const std::size_t n = 4 * 365 * 24;
  const auto gauss = jb_scan(synth::as_prices(synth::gaussian(n, 21, 0.01)));
  const auto fat = jb_scan(synth::as_prices(synth::student_t(n, 3.0, 21)));
  CHECK(gauss.points.size() == 9);
  CHECK(fat.slope < -1.0);
  CHECK(gauss.slope > fat.slope);
  CHECK(std::is_sorted(fat.points.begin(), fat.points.end(),
                       [](auto a, auto b) { return a.horizon_days < b.horizon_days; }));
}

TEST_CASE("JB scan drops short horizons and needs three") {
  const auto p = synth::as_prices(synth::student_t(24 * 20, 3.0, 4));
  const auto scan = jb_scan(p);
  CHECK(scan.has_dropped());
  CHECK(scan.points.size() >= 3);
  const auto tiny = synth::as_prices(synth::student_t(30, 3.0, 4));
  CHECK_ERRC(jb_scan(tiny), Errc::insufficient_data);
}
