#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stylized/crosssection.hpp"
#include "stylized/timeseries.hpp"

// Seeded synthetic return generators used across the test suites.
namespace synth {

std::vector<double> gaussian(std::size_t n, std::uint64_t seed, double sigma = 1.0);
std::vector<double> student_t(std::size_t n, double dof, std::uint64_t seed);
std::vector<double> laplace(std::size_t n, double scale, std::uint64_t seed);

/// x = +/- U^(-1/alpha) with a fair random sign.
std::vector<double> pareto_symmetric(std::size_t n, double alpha, std::uint64_t seed);

/// GARCH(1,1) with unit unconditional variance.
std::vector<double> garch(std::size_t n, double alpha, double beta, std::uint64_t seed,
                          std::size_t burn_in = 1000);

/// GJR-GARCH: negative shocks add gamma to the ARCH weight.
std::vector<double> gjr(std::size_t n, double alpha, double gamma, double beta, std::uint64_t seed,
                        std::size_t burn_in = 1000);

/// GARCH(1,1) shocks scaled by Student-t innovations.
std::vector<double> garch_t(std::size_t n, double alpha, double beta, double dof, std::uint64_t seed);

std::vector<double> ar1(std::size_t n, double phi, std::uint64_t seed);

/// Hourly returns, 24 per day. Day volatility follows the previous days'
/// squared daily returns, so coarse volatility leads fine volatility.
std::vector<double> tra_process(std::size_t days, std::uint64_t seed);

/// Returns r_it = beta f_t + sqrt(1 - beta^2) e_it, n_times x n_assets.
stylized::ReturnPanel one_factor_panel(std::size_t n_times, std::size_t n_assets, double beta,
                                       std::uint64_t seed);

/// Values on a gapless grid: point i sits at start + (i + 1) * horizon.
stylized::ReturnSeries as_returns(const std::vector<double>& values, std::int64_t horizon = 3600,
                                  stylized::Timestamp start = 0, std::string id = "SYN");

/// Cumulative prices p_0 exp(sum r); point i at start + i * interval.
stylized::PriceSeries as_prices(const std::vector<double>& returns, std::int64_t interval = 3600,
                                stylized::Timestamp start = 0, double p0 = 100.0,
                                std::string id = "SYN");

/// Geometric Brownian motion prices on an hourly grid.
stylized::PriceSeries gbm_prices(std::size_t n, double sigma, std::uint64_t seed,
                                 stylized::Timestamp start = 0, std::string id = "GBM");

}  // namespace synth
