#include "synth.hpp"

#include <cmath>
#include <random>

namespace synth {

using stylized::PricePoint;
using stylized::ReturnPoint;

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, sigma);
  std::vector<double> out(n);
  for (auto& v : out) v = z(rng);
  return out;
}

std::vector<double> student_t(std::size_t n, double dof, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> t(dof);
  std::vector<double> out(n);
  for (auto& v : out) v = t(rng);
  return out;
}

std::vector<double> laplace(std::size_t n, double scale, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> e(1.0 / scale);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> out(n);
  for (auto& v : out) v = sign(rng) ? e(rng) : -e(rng);
  return out;
}

std::vector<double> pareto_symmetric(std::size_t n, double alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::bernoulli_distribution sign(0.5);
  std::vector<double> out(n);
  for (auto& v : out) {
    double x = 0.0;
    do {
      x = u(rng);
    } while (x <= 0.0);
    const double m = std::pow(x, -1.0 / alpha);
    v = sign(rng) ? m : -m;
  }
  return out;
}

std::vector<double> garch(std::size_t n, double alpha, double beta, std::uint64_t seed,
                          std::size_t burn_in) {
  return gjr(n, alpha, 0.0, beta, seed, burn_in);
}

std::vector<double> gjr(std::size_t n, double alpha, double gamma, double beta, std::uint64_t seed,
                        std::size_t burn_in) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  const double omega = 1.0 - alpha - gamma / 2.0 - beta;
  double var = 1.0;
  double prev = 0.0;
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t t = 0; t < n + burn_in; ++t) {
    var = omega + (alpha + (prev < 0.0 ? gamma : 0.0)) * prev * prev + beta * var;
    prev = std::sqrt(var) * z(rng);
    if (t >= burn_in) out.push_back(prev);
  }
  return out;
}

std::vector<double> garch_t(std::size_t n, double alpha, double beta, double dof, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::student_t_distribution<double> t(dof);
  const double unit = std::sqrt((dof - 2.0) / dof);
  const double omega = 1.0 - alpha - beta;
  double var = 1.0;
  double prev = 0.0;
  std::vector<double> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n + 1000; ++i) {
    var = omega + alpha * prev * prev + beta * var;
    prev = std::sqrt(var) * unit * t(rng);
    if (i >= 1000) out.push_back(prev);
  }
  return out;
}

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> out(n);
  double x = 0.0;
  for (auto& v : out) {
    x = phi * x + z(rng);
    v = x;
  }
  return out;
}

std::vector<double> tra_process(std::size_t days, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> out;
  out.reserve(days * 24);
  double memory = 1.0;
  for (std::size_t d = 0; d < days; ++d) {
    const double sig = std::sqrt(0.2 + 0.6 * memory);
    double day_return = 0.0;
    for (int h = 0; h < 24; ++h) {
      const double r = sig / std::sqrt(24.0) * z(rng);
      day_return += r;
      out.push_back(r);
    }
    memory = 0.9 * memory + 0.1 * day_return * day_return;
  }
  return out;
}

stylized::ReturnPanel one_factor_panel(std::size_t n_times, std::size_t n_assets, double beta,
                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  stylized::ReturnPanel panel;
  for (std::size_t a = 0; a < n_assets; ++a) panel.asset_ids.push_back("A" + std::to_string(a));
  panel.matrix = stylized::Matrix(n_times, n_assets);
  const double idio = std::sqrt(1.0 - beta * beta);
  for (std::size_t t = 0; t < n_times; ++t) {
    panel.timestamps.push_back(static_cast<stylized::Timestamp>(t + 1) * 86400);
    const double f = z(rng);
    for (std::size_t a = 0; a < n_assets; ++a) panel.matrix(t, a) = beta * f + idio * z(rng);
  }
  return panel;
}

stylized::ReturnSeries as_returns(const std::vector<double>& values, std::int64_t horizon,
                                  stylized::Timestamp start, std::string id) {
  std::vector<ReturnPoint> pts(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    pts[i] = {start + static_cast<stylized::Timestamp>(i + 1) * horizon, values[i]};
  }
  return {std::move(id), horizon, std::move(pts)};
}

stylized::PriceSeries as_prices(const std::vector<double>& returns, std::int64_t interval,
                                stylized::Timestamp start, double p0, std::string id) {
  std::vector<PricePoint> pts;
  pts.reserve(returns.size() + 1);
  double log_p = std::log(p0);
  pts.push_back({start, p0});
  for (std::size_t i = 0; i < returns.size(); ++i) {
    log_p += returns[i];
    pts.push_back({start + static_cast<stylized::Timestamp>(i + 1) * interval, std::exp(log_p)});
  }
  return {std::move(id), interval, std::move(pts)};
}

stylized::PriceSeries gbm_prices(std::size_t n, double sigma, std::uint64_t seed, stylized::Timestamp start,
                                 std::string id) {
  return as_prices(gaussian(n, seed, sigma), 3600, start, 100.0, std::move(id));
}

}  // namespace synth
