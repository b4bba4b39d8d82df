#include "stylized/crosssection.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <random>
#include <thread>

#include "stylized/error.hpp"
#include "stylized/hash.hpp"
#include "stylized/stats.hpp"

namespace stylized {

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

ReturnPanel align_panel(std::span<const ReturnSeries> series) {
  if (series.size() < 2) throw Error(Errc::invalid_argument, "align_panel needs at least 2 series");
  const auto horizon = series.front().horizon_seconds();
  for (const auto& s : series) {
    if (s.horizon_seconds() != horizon) {
      throw Error(Errc::invalid_argument, "align_panel: series have different horizons");
    }
  }
  std::vector<Timestamp> common = series.front().times();
  for (std::size_t a = 1; a < series.size(); ++a) {
    const auto t = series[a].times();
    std::vector<Timestamp> next;
    std::set_intersection(common.begin(), common.end(), t.begin(), t.end(), std::back_inserter(next));
    common = std::move(next);
  }
  if (common.empty()) throw Error(Errc::insufficient_data, "align_panel: no common timestamps");

  ReturnPanel panel;
  panel.timestamps = common;
  panel.matrix = Matrix(common.size(), series.size());
  for (std::size_t a = 0; a < series.size(); ++a) {
    panel.asset_ids.push_back(series[a].asset_id());
    const auto pts = series[a].points();
    std::size_t j = 0;
    for (std::size_t r = 0; r < common.size(); ++r) {
      while (pts[j].time < common[r]) ++j;
      panel.matrix(r, a) = pts[j].value;
    }
  }
  return panel;
}

Matrix correlation_matrix(const Matrix& obs, std::span<const std::string> labels) {
  const auto n = obs.rows();
  const auto m = obs.cols();
  if (n < 3) throw Error(Errc::insufficient_data, "correlation needs at least 3 observations");
  auto label = [&](std::size_t c) {
    return c < labels.size() ? labels[c] : "column " + std::to_string(c);
  };

  Eigen::MatrixXd x(n, m);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < m; ++c) x(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = obs(r, c);
  }
  const Eigen::RowVectorXd mu = x.colwise().mean();
  x.rowwise() -= mu;
  Eigen::VectorXd norm = x.colwise().norm();
  for (Eigen::Index c = 0; c < norm.size(); ++c) {
    if (!(norm(c) > 0.0)) {
      throw Error(Errc::degenerate_series, "zero variance for " + label(static_cast<std::size_t>(c)));
    }
  }
  const Eigen::MatrixXd cov = x.transpose() * x;
  Matrix out(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    out(i, i) = 1.0;
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto ii = static_cast<Eigen::Index>(i);
      const auto jj = static_cast<Eigen::Index>(j);
      const double r = std::clamp(cov(ii, jj) / (norm(ii) * norm(jj)), -1.0, 1.0);
      out(i, j) = r;
      out(j, i) = r;
    }
  }
  return out;
}

Matrix correlation_matrix(const ReturnPanel& panel) {
  return correlation_matrix(panel.matrix, panel.asset_ids);
}

ReturnPanel clean_panel(const ReturnPanel& panel, std::span<const double> last_prices,
                        double min_price, double max_correlation) {
  if (last_prices.size() != panel.n_assets()) {
    throw Error(Errc::invalid_argument, "clean_panel: one last price per asset required");
  }
  std::vector<std::size_t> keep;
  for (std::size_t a = 0; a < panel.n_assets(); ++a) {
    if (last_prices[a] >= min_price) keep.push_back(a);
  }
  auto select = [&](const std::vector<std::size_t>& cols) {
    ReturnPanel out;
    out.timestamps = panel.timestamps;
    out.matrix = Matrix(panel.n_times(), cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      out.asset_ids.push_back(panel.asset_ids[cols[c]]);
      for (std::size_t r = 0; r < panel.n_times(); ++r) out.matrix(r, c) = panel.matrix(r, cols[c]);
    }
    return out;
  };
  const auto priced = select(keep);
  if (priced.n_assets() < 2) return priced;
  const auto corr = correlation_matrix(priced);
  std::vector<bool> dropped(priced.n_assets(), false);
  for (std::size_t i = 0; i < priced.n_assets(); ++i) {
    if (dropped[i]) continue;
    for (std::size_t j = i + 1; j < priced.n_assets(); ++j) {
      if (!dropped[j] && corr(i, j) > max_correlation) dropped[j] = true;
    }
  }
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (!dropped[i]) survivors.push_back(keep[i]);
  }
  return select(survivors);
}

double marchenko_pastur_edge(std::size_t n_assets, std::size_t n_times) {
  if (n_times == 0) throw Error(Errc::invalid_argument, "n_times must be positive");
  const double q = static_cast<double>(n_assets) / static_cast<double>(n_times);
  const double root = 1.0 + std::sqrt(q);
  return root * root;
}

EigenReport eigen_spectrum(const Matrix& corr, std::size_t n_times) {
  const auto n = corr.rows();
  if (n == 0 || corr.cols() != n) throw Error(Errc::invalid_argument, "eigen_spectrum needs a square matrix");
  Eigen::MatrixXd a(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(corr(i, j) - corr(j, i)) > 1e-9) {
        throw Error(Errc::invalid_argument, "eigen_spectrum: matrix is not symmetric");
      }
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = corr(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
  if (solver.info() != Eigen::Success) throw Error(Errc::degenerate_series, "eigen solver failed");

  EigenReport report;
  const auto& values = solver.eigenvalues();  // ascending
  report.eigenvalues.resize(n);
  for (std::size_t i = 0; i < n; ++i) report.eigenvalues[i] = values(static_cast<Eigen::Index>(n - 1 - i));
  const double total = std::accumulate(report.eigenvalues.begin(), report.eigenvalues.end(), 0.0);
  if (!(total > 0.0)) throw Error(Errc::degenerate_series, "eigenvalues sum to zero");
  for (double v : report.eigenvalues) report.explained_fraction.push_back(v / total);

  const auto v = solver.eigenvectors().col(static_cast<Eigen::Index>(n - 1));
  const double sign = v.sum() < 0.0 ? -1.0 : 1.0;
  report.first_eigenvector.resize(n);
  bool uniform = true;
  for (std::size_t i = 0; i < n; ++i) {
    report.first_eigenvector[i] = sign * v(static_cast<Eigen::Index>(i));
    uniform = uniform && report.first_eigenvector[i] > 0.0;
  }
  report.first_eigvec_sign_uniform = uniform;
  report.baseline_edge = marchenko_pastur_edge(n, std::max<std::size_t>(n_times, 1));
  return report;
}

std::vector<double> BootstrapSpectrum::conservative() const {
  std::vector<double> out(mean_fraction.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = mean_fraction[i] - 3.0 * stderr_fraction[i];
  return out;
}

BootstrapSpectrum bootstrap_spectrum(const ReturnPanel& panel, std::size_t sample_size, std::size_t trials,
                                     std::uint64_t seed, bool with_replacement, unsigned threads) {
  const auto width = panel.n_assets();
  if (sample_size < 1 || trials < 1 || width == 0) {
    throw Error(Errc::invalid_argument, "bootstrap_spectrum: empty sample or panel");
  }
  if (!with_replacement && sample_size > width) {
    throw Error(Errc::invalid_argument, "sample larger than the panel without replacement");
  }

  std::vector<std::vector<double>> fractions(trials);
  auto run_trial = [&](std::size_t t) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
    std::mt19937_64 rng(seq);
    std::vector<std::size_t> cols(sample_size);
    if (with_replacement) {
      std::uniform_int_distribution<std::size_t> pick(0, width - 1);
      for (auto& c : cols) c = pick(rng);
    } else {
      std::vector<std::size_t> all(width);
      std::iota(all.begin(), all.end(), 0);
      for (std::size_t i = 0; i < sample_size; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, width - 1);
        std::swap(all[i], all[pick(rng)]);
      }
      std::copy_n(all.begin(), sample_size, cols.begin());
    }
    Matrix sub(panel.n_times(), sample_size);
    for (std::size_t r = 0; r < panel.n_times(); ++r) {
      for (std::size_t c = 0; c < sample_size; ++c) sub(r, c) = panel.matrix(r, cols[c]);
    }
    fractions[t] = eigen_spectrum(correlation_matrix(sub), panel.n_times()).explained_fraction;
  };

  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, trials));
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t t = w; t < trials; t += workers) run_trial(t);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    pool.clear();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  BootstrapSpectrum out;
  out.trials = trials;
  out.sample_size = sample_size;
  out.mean_fraction.assign(sample_size, 0.0);
  out.stderr_fraction.assign(sample_size, 0.0);
  for (const auto& f : fractions) {
    for (std::size_t k = 0; k < sample_size; ++k) out.mean_fraction[k] += f[k];
  }
  for (auto& m : out.mean_fraction) m /= static_cast<double>(trials);
  if (trials > 1) {
    for (std::size_t k = 0; k < sample_size; ++k) {
      double ss = 0.0;
      for (const auto& f : fractions) ss += (f[k] - out.mean_fraction[k]) * (f[k] - out.mean_fraction[k]);
      out.stderr_fraction[k] = std::sqrt(ss / static_cast<double>(trials - 1)) /
                               std::sqrt(static_cast<double>(trials));
    }
  }
  return out;
}

std::vector<RollingEigenPoint> rolling_first_eigen(const ReturnPanel& panel, std::size_t window,
                                                   std::size_t step) {
  if (window < 3 || step < 1) throw Error(Errc::invalid_argument, "window must be >= 3 and step >= 1");
  if (panel.n_times() < window) {
    throw Error(Errc::insufficient_data, "rolling window of " + std::to_string(window) +
                                             " exceeds the " + std::to_string(panel.n_times()) +
                                             "-row history");
  }
  const auto m = panel.n_assets();
  std::vector<double> cumulative(panel.n_times());
  double running = 0.0;
  for (std::size_t r = 0; r < panel.n_times(); ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < m; ++c) row += panel.matrix(r, c);
    running += row / static_cast<double>(m);
    cumulative[r] = running;
  }

  std::vector<RollingEigenPoint> out;
  Matrix slice(window, m);
  for (std::size_t end = window - 1; end < panel.n_times(); end += step) {
    const std::size_t begin = end + 1 - window;
    for (std::size_t r = 0; r < window; ++r) {
      for (std::size_t c = 0; c < m; ++c) slice(r, c) = panel.matrix(begin + r, c);
    }
    const auto report = eigen_spectrum(correlation_matrix(slice, panel.asset_ids), window);
    out.push_back({panel.timestamps[end], report.explained_fraction.front(), cumulative[end]});
  }
  return out;
}

FactsDistanceMatrix stylized_distance_matrix(const FeatureTable& table) {
  FactsDistanceMatrix out;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const bool complete = row.size() == table.column_names.size() &&
                          std::all_of(row.begin(), row.end(), [](const auto& v) { return v.has_value(); });
    if (complete) {
      rows.push_back(r);
    } else {
      out.dropped_rows.push_back(table.row_labels[r]);
    }
  }
  if (rows.size() < 3) {
    throw Error(Errc::insufficient_data, "distance matrix needs at least 3 complete rows");
  }

  std::vector<std::vector<double>> z;  // per kept column
  for (std::size_t c = 0; c < table.column_names.size(); ++c) {
    std::vector<double> col;
    for (auto r : rows) col.push_back(*table.rows[r][c]);
    const double m = stats::mean(col);
    const double s = stats::sample_std(col);
    if (!(s > 0.0)) {
      out.dropped_columns.push_back(table.column_names[c]);
      continue;
    }
    for (double& v : col) v = (v - m) / s;
    z.push_back(std::move(col));
  }
  if (z.empty()) throw Error(Errc::degenerate_series, "every feature column is constant");

  const auto n = rows.size();
  for (auto r : rows) out.labels.push_back(table.row_labels[r]);
  out.matrix = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double ss = 0.0;
      for (const auto& col : z) ss += (col[i] - col[j]) * (col[i] - col[j]);
      out.matrix(i, j) = std::sqrt(ss);
      out.matrix(j, i) = out.matrix(i, j);
    }
  }
  return out;
}

Clustering hierarchical_cluster(const FactsDistanceMatrix& dist, std::size_t n_clusters) {
  const auto n = dist.labels.size();
  if (n == 0 || dist.matrix.rows() != n || dist.matrix.cols() != n) {
    throw Error(Errc::invalid_argument, "distance matrix and labels disagree");
  }
  if (n_clusters < 1 || n_clusters > n) {
    throw Error(Errc::invalid_argument, "n_clusters must lie in [1, " + std::to_string(n) + "]");
  }

  struct Active {
    std::size_t id;
    std::size_t first_leaf;  // member with the smallest label
    std::size_t size;
  };
  auto label_less = [&](std::size_t a, std::size_t b) {
    if (dist.labels[a] != dist.labels[b]) return dist.labels[a] < dist.labels[b];
    return a < b;
  };

  std::vector<Active> active;
  for (std::size_t i = 0; i < n; ++i) active.push_back({i, i, 1});
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = dist.matrix(i, j);
  }

  Clustering out;
  std::vector<std::pair<std::size_t, std::size_t>> children;  // per merge, in id space
  while (active.size() > 1) {
    std::size_t best_a = 0, best_b = 1;
    auto key = [&](std::size_t a, std::size_t b) {
      auto la = active[a].first_leaf, lb = active[b].first_leaf;
      if (label_less(lb, la)) std::swap(la, lb);
      return std::pair{la, lb};
    };
    auto key_less = [&](std::pair<std::size_t, std::size_t> x, std::pair<std::size_t, std::size_t> y) {
      if (x.first != y.first) return label_less(x.first, y.first);
      return label_less(x.second, y.second);
    };
    for (std::size_t a = 0; a < active.size(); ++a) {
      for (std::size_t b = a + 1; b < active.size(); ++b) {
        const double dab = d[a][b];
        const double best = d[best_a][best_b];
        if (dab < best || (dab == best && key_less(key(a, b), key(best_a, best_b)))) {
          best_a = a;
          best_b = b;
        }
      }
    }
    if (label_less(active[best_b].first_leaf, active[best_a].first_leaf)) std::swap(best_a, best_b);
    const auto& left = active[best_a];
    const auto& right = active[best_b];
    Merge merge{left.id, right.id, d[best_a][best_b], left.size + right.size};
    out.merges.push_back(merge);
    children.emplace_back(left.id, right.id);

    Active joined{n + out.merges.size() - 1,
                  label_less(left.first_leaf, right.first_leaf) ? left.first_leaf : right.first_leaf,
                  merge.size};
    // Complete linkage: distance to the union is the larger of the two.
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double v = std::max(d[best_a][k], d[best_b][k]);
      d[best_a][k] = v;
      d[k][best_a] = v;
    }
    d[best_a][best_a] = 0.0;
    active[best_a] = joined;
    active.erase(active.begin() + static_cast<std::ptrdiff_t>(best_b));
    d.erase(d.begin() + static_cast<std::ptrdiff_t>(best_b));
    for (auto& row : d) row.erase(row.begin() + static_cast<std::ptrdiff_t>(best_b));
  }

  // Leaf order: depth-first from the root, left child first.
  std::vector<std::size_t> stack{n == 1 ? 0 : n + out.merges.size() - 1};
  while (!stack.empty()) {
    const auto id = stack.back();
    stack.pop_back();
    if (id < n) {
      out.leaf_order.push_back(id);
    } else {
      const auto [l, r] = children[id - n];
      stack.push_back(r);
      stack.push_back(l);
    }
  }

  // Flat cut: replay the first n - n_clusters merges.
  std::vector<std::size_t> parent(n + out.merges.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t m = 0; m < n - n_clusters; ++m) {
    parent[find(out.merges[m].left)] = n + m;
    parent[find(out.merges[m].right)] = n + m;
  }
  out.labels.assign(n, -1);
  std::vector<std::pair<std::size_t, int>> seen;
  for (std::size_t i = 0; i < n; ++i) {
    const auto root = find(i);
    auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& s) { return s.first == root; });
    if (it == seen.end()) {
      seen.emplace_back(root, static_cast<int>(seen.size()));
      out.labels[i] = seen.back().second;
    } else {
      out.labels[i] = it->second;
    }
  }
  return out;
}

MatrixCache::MatrixCache(std::filesystem::path directory) : directory_(std::move(directory)) {}

std::filesystem::path MatrixCache::path_for(const std::string& key) const {
  return directory_ / (key + ".bin");
}

namespace {
constexpr char kMatrixMagic[4] = {'S', 'F', 'M', 'X'};
}

std::optional<Matrix> MatrixCache::load(const std::string& key) const {
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::uint64_t rows = 0, cols = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&rows), sizeof rows);
  in.read(reinterpret_cast<char*>(&cols), sizeof cols);
  if (!in || std::memcmp(magic, kMatrixMagic, 4) != 0) return std::nullopt;
  Matrix m(rows, cols);
  in.read(reinterpret_cast<char*>(m.data().data()),
          static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  if (!in) return std::nullopt;
  return m;
}

void MatrixCache::store(const std::string& key, const Matrix& m) const {
  std::filesystem::create_directories(directory_);
  const auto target = path_for(key);
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    const std::uint64_t rows = m.rows(), cols = m.cols();
    out.write(kMatrixMagic, 4);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    out.write(reinterpret_cast<const char*>(m.data().data()),
              static_cast<std::streamsize>(m.data().size() * sizeof(double)));
  }
  std::filesystem::rename(tmp, target);
}

std::string panel_hash(const ReturnPanel& panel) {
  std::string bytes;
  for (const auto& id : panel.asset_ids) {
    bytes += id;
    bytes.push_back('\0');
  }
  bytes.append(reinterpret_cast<const char*>(panel.timestamps.data()),
               panel.timestamps.size() * sizeof(Timestamp));
  const auto cells = panel.matrix.data();
  bytes.append(reinterpret_cast<const char*>(cells.data()), cells.size() * sizeof(double));
  return sha256_hex(bytes);
}

}  // namespace stylized
