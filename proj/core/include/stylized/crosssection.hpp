#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stylized/timeseries.hpp"

namespace stylized {

/// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  [[nodiscard]] double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }
  [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
  [[nodiscard]] std::span<double> data() noexcept { return data_; }
  [[nodiscard]] std::vector<double> column(std::size_t c) const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Returns of several assets on a common set of timestamps.
struct ReturnPanel {
  std::vector<std::string> asset_ids;
  std::vector<Timestamp> timestamps;
  Matrix matrix;  // n_times x n_assets

  [[nodiscard]] std::size_t n_times() const noexcept { return matrix.rows(); }
  [[nodiscard]] std::size_t n_assets() const noexcept { return matrix.cols(); }
  /// Fewer observations than assets: the correlation matrix is rank-deficient.
  [[nodiscard]] bool underdetermined() const noexcept { return n_times() <= n_assets(); }
};

/// Intersection of timestamps; a row is kept only when every asset has it.
[[nodiscard]] ReturnPanel align_panel(std::span<const ReturnSeries> series);

/// Pearson correlation between columns, unit diagonal. Throws
/// degenerate_series naming any zero-variance asset.
[[nodiscard]] Matrix correlation_matrix(const ReturnPanel& panel);
[[nodiscard]] Matrix correlation_matrix(const Matrix& observations,
                                        std::span<const std::string> labels = {});

/// Drops assets priced below `min_price` at the last observation and, from
/// each pair correlated above `max_correlation`, the later asset.
[[nodiscard]] ReturnPanel clean_panel(const ReturnPanel& panel,
                                      std::span<const double> last_prices, double min_price,
                                      double max_correlation);

struct EigenReport {
  std::vector<double> eigenvalues;         // descending
  std::vector<double> explained_fraction;  // eigenvalue / sum
  std::vector<double> first_eigenvector;   // sign fixed so that the sum is >= 0
  bool first_eigvec_sign_uniform = false;
  double baseline_edge = 0.0;  // (1 + sqrt(n_assets / n_times))^2
};

/// Symmetric eigen-decomposition of a correlation matrix. `n_times` sizes the
/// random-matrix baseline. Throws invalid_argument if asymmetric beyond 1e-9.
[[nodiscard]] EigenReport eigen_spectrum(const Matrix& corr, std::size_t n_times);

/// Largest eigenvalue expected from iid standardized returns.
[[nodiscard]] double marchenko_pastur_edge(std::size_t n_assets, std::size_t n_times);

struct BootstrapSpectrum {
  std::vector<double> mean_fraction;    // per rank
  std::vector<double> stderr_fraction;  // per rank, std / sqrt(trials)
  std::size_t trials = 0;
  std::size_t sample_size = 0;

  /// mean - 3 * stderr per rank.
  [[nodiscard]] std::vector<double> conservative() const;
};

/// Per trial, draws `sample_size` columns (with replacement unless disabled),
/// computes sorted explained fractions, and averages them across trials.
/// Trial t uses an RNG seeded from (seed, t), so the result does not depend on
/// the thread count.
[[nodiscard]] BootstrapSpectrum bootstrap_spectrum(const ReturnPanel& panel,
                                                   std::size_t sample_size = 145,
                                                   std::size_t trials = 500,
                                                   std::uint64_t seed = 0,
                                                   bool with_replacement = true,
                                                   unsigned threads = 0);

struct RollingEigenPoint {
  Timestamp time = 0;
  double first_fraction = 0.0;
  double cumulative_mean_log_return = 0.0;
};

/// First explained fraction of the trailing `window`-row correlation matrix,
/// recorded at each window end (every `step` rows), next to the running sum of
/// the cross-asset mean return.
[[nodiscard]] std::vector<RollingEigenPoint> rolling_first_eigen(const ReturnPanel& panel,
                                                                 std::size_t window = 60,
                                                                 std::size_t step = 1);

struct FactsDistanceMatrix {
  std::vector<std::string> labels;
  Matrix matrix;
  std::vector<std::size_t> linkage_order;  // filled by hierarchical_cluster
  std::vector<std::string> dropped_columns;
  std::vector<std::string> dropped_rows;
};

/// Rows of named features; `nullopt` marks a missing value.
struct FeatureTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_names;
  std::vector<std::vector<std::optional<double>>> rows;
};

/// z-scores every column (n-1 std) and takes Euclidean distances between rows.
/// Constant columns are dropped; rows missing any kept column are dropped.
/// Throws insufficient_data with fewer than 3 usable rows.
[[nodiscard]] FactsDistanceMatrix stylized_distance_matrix(const FeatureTable& table);

struct Merge {
  std::size_t left = 0;   // cluster ids: < n are leaves, n + i is merge i
  std::size_t right = 0;
  double height = 0.0;
  std::size_t size = 0;
};

struct Clustering {
  std::vector<Merge> merges;             // n - 1 merges, nondecreasing height
  std::vector<std::size_t> leaf_order;   // dendrogram order for heat maps
  std::vector<int> labels;               // flat cluster per input row
};

/// Complete-linkage agglomeration. Among equally close pairs the one whose
/// smallest member labels sort first lexicographically merges first.
[[nodiscard]] Clustering hierarchical_cluster(const FactsDistanceMatrix& dist,
                                              std::size_t n_clusters = 8);

/// Binary cache of matrices keyed by a content hash.
class MatrixCache {
 public:
  explicit MatrixCache(std::filesystem::path directory);

  [[nodiscard]] std::optional<Matrix> load(const std::string& key) const;
  void store(const std::string& key, const Matrix& m) const;
  [[nodiscard]] std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path directory_;
};

/// SHA-256 over asset ids, timestamps and cell bytes.
[[nodiscard]] std::string panel_hash(const ReturnPanel& panel);

}  // namespace stylized
