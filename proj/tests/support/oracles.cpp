#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

namespace {

LagCorrelation from_pairs(const std::vector<double>& a, const std::vector<double>& b) {
  const auto n = static_cast<double>(a.size());
  if (a.empty()) return {};
  double mu1 = 0.0, mu2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mu1 += a[i];
    mu2 += b[i];
  }
  mu1 /= n;
  mu2 /= n;
  double v1 = 0.0, v2 = 0.0, cov = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    v1 += (a[i] - mu1) * (a[i] - mu1);
    v2 += (b[i] - mu2) * (b[i] - mu2);
    cov += (a[i] - mu1) * (b[i] - mu2);
  }
  const double s1 = std::sqrt(v1 / n), s2 = std::sqrt(v2 / n);
  return {cov / n / (s1 * s2), a.size()};
}

}  // namespace

LagCorrelation pair_set_correlation(const std::vector<double>& x, const std::vector<double>& y,
                                    const std::vector<std::int64_t>& times, std::int64_t offset) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = 0; j < times.size(); ++j) {
      if (times[j] - times[i] == offset) {
        a.push_back(x[i]);
        b.push_back(y[j]);
      }
    }
  }
  return from_pairs(a, b);
}

LagCorrelation index_lag_correlation(const std::vector<double>& x, const std::vector<double>& y, int k) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto j = static_cast<std::int64_t>(i) + k;
    if (j < 0 || j >= static_cast<std::int64_t>(y.size())) continue;
    a.push_back(x[i]);
    b.push_back(y[static_cast<std::size_t>(j)]);
  }
  return from_pairs(a, b);
}

double jarque_bera(const std::vector<double>& v) {
  const auto n = static_cast<double>(v.size());
  double mu = 0.0;
  for (double x : v) mu += x;
  mu /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : v) {
    const double d = x - mu;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double s = m3 / std::pow(m2, 1.5);
  const double k = m4 / (m2 * m2);
  return n / 6.0 * (s * s + (k - 3.0) * (k - 3.0) / 4.0);
}

double tail_probability(const std::vector<double>& v, double x, bool right) {
  std::size_t count = 0;
  for (double e : v) {
    if (right ? e > x : e <= -x) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(v.size());
}

double largest_eigenvalue(const std::vector<std::vector<double>>& m, int iterations) {
  const auto n = m.size();
  std::vector<double> v(n, 1.0), w(n);
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.0;
      for (std::size_t j = 0; j < n; ++j) w[i] += m[i][j] * v[j];
      norm += w[i] * w[i];
    }
    norm = std::sqrt(norm);
    double rayleigh = 0.0;
    for (std::size_t i = 0; i < n; ++i) rayleigh += v[i] * w[i];
    double vv = 0.0;
    for (double e : v) vv += e * e;
    lambda = rayleigh / vv;
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / norm;
  }
  return lambda;
}

std::vector<double> complete_linkage_heights(const std::vector<std::vector<double>>& d) {
  std::vector<std::vector<std::size_t>> clusters;
  for (std::size_t i = 0; i < d.size(); ++i) clusters.push_back({i});
  std::vector<double> heights;
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 1;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double far = 0.0;
        for (auto a : clusters[i]) {
          for (auto b : clusters[j]) far = std::max(far, d[a][b]);
        }
        if (far < best) {
          best = far;
          bi = i;
          bj = j;
        }
      }
    }
    heights.push_back(best);
    clusters[bi].insert(clusters[bi].end(), clusters[bj].begin(), clusters[bj].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bj));
  }
  return heights;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  return from_pairs(x, y).value;
}

}  // namespace oracle
