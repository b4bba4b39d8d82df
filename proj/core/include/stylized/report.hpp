#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stylized/calendar.hpp"
#include "stylized/crosssection.hpp"
#include "stylized/dependence.hpp"
#include "stylized/distribution.hpp"
#include "stylized/ingestion.hpp"
#include "stylized/timeseries.hpp"

namespace stylized {

/// A statistic that may be absent; `reason` carries the error code when it is.
struct Field {
  std::optional<double> value;
  std::string reason;

  [[nodiscard]] bool present() const noexcept { return value.has_value(); }
};

/// One asset's statistics, one member per Table-1 style column.
struct StylizedFactsRow {
  std::string asset_id;
  std::string sector;
  Timestamp history_start = 0;
  Timestamp history_end = 0;
  Field zeros_pct;
  Field avg_acf_1_24;
  Field avg_acf_else;
  Field volclust_slope;
  Field volclust_intercept;
  Field avg_lev_pos;
  Field avg_lev_neg;
  Field tra_ini;
  Field tra_fin;
  Field cdf_tail_right;
  Field cdf_tail_left;
  Field jb_slope;
  /// Quality notes such as "cdf_tail_right:low_r2".
  std::vector<std::string> flags;

  [[nodiscard]] static const std::vector<std::string>& numeric_columns();
  [[nodiscard]] const Field& field(std::string_view column) const;
  [[nodiscard]] Field& field(std::string_view column);
  [[nodiscard]] bool complete() const;
};

enum class CalendarKind { always_open, us_equity };

struct AssetSource {
  std::string id;
  std::string sector;
  SourceSpec source;
  CalendarKind calendar = CalendarKind::always_open;
};

struct RunConfig {
  std::vector<AssetSource> sources;
  std::optional<Timestamp> from;
  std::optional<Timestamp> to;
  std::vector<double> jb_horizons_days = default_jb_horizons();
  int acf_max_lag = 96;
  int lev_max_lag = 96;
  int vol_min_lag = 1;
  int vol_max_lag = 96;
  double vol_min_scaled = 3.0;
  double tail_threshold = 2.0;
  /// Tail fits with r^2 below this, or beaten by the exponential fit, are flagged.
  double tail_min_r2 = 0.99;
  int tra_max_n = 20;
  std::int64_t day_offset_seconds = 0;
  std::size_t n_clusters = 8;
  bool cluster_include_zeros = false;
  std::size_t rolling_window = 60;
  std::size_t bootstrap_sample = 145;
  std::size_t bootstrap_trials = 0;  // 0 disables the bootstrap stage
  bool bootstrap_with_replacement = true;
  bool allow_network = false;
  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path output_dir = "report";
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

/// Parses the JSON run configuration. Relative paths resolve against
/// `base_dir`. Throws config_error.
[[nodiscard]] RunConfig parse_config(std::string_view json_text,
                                     const std::filesystem::path& base_dir = ".");
[[nodiscard]] RunConfig load_config(const std::filesystem::path& path);

/// "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SSZ" or integer epoch seconds.
[[nodiscard]] Timestamp parse_date(std::string_view text);
[[nodiscard]] std::string format_date(Timestamp t);

/// SHA-256 of the canonical JSON form of the configuration.
[[nodiscard]] std::string config_hash(const RunConfig& config);

[[nodiscard]] SessionCalendar make_calendar(CalendarKind kind, std::int64_t day_offset_seconds = 0);

/// Intermediate curves kept for plot output.
struct AssetDetail {
  std::optional<ReturnSeries> hourly;
  std::optional<MountainCdf> mountain;
  std::optional<AcfResult> acf_returns;
  std::optional<AcfResult> acf_abs;
  std::optional<VolClusterFit> vol_fit;
  std::optional<LeverageCurve> leverage;
  std::optional<TraResult> tra;
  std::optional<JbScan> jb;
  std::vector<TailFit> power_fits;
  std::vector<TailFit> exp_fits;
};

struct AssetResult {
  StylizedFactsRow row;
  AssetDetail detail;
};

/// Hourly pipeline for one asset. Statistics that fail are left absent with a
/// reason code. Throws insufficient_data when the history is shorter than
/// 60 days.
[[nodiscard]] AssetResult compute_asset(const PriceSeries& prices, const AssetSource& meta,
                                        const RunConfig& config);
[[nodiscard]] StylizedFactsRow compute_row(const PriceSeries& prices, const RunConfig& config);

struct CrossSection {
  ReturnPanel daily_panel;
  Matrix correlation;
  EigenReport eigen;
  std::optional<BootstrapSpectrum> bootstrap;
  std::vector<RollingEigenPoint> rolling;
  std::optional<FactsDistanceMatrix> distance;
  std::optional<Clustering> clustering;
  std::vector<std::string> notes;
};

struct AssetFailure {
  std::string asset_id;
  std::string reason;
  std::string message;
};

struct Report {
  RunConfig config;
  std::vector<AssetResult> assets;  // sorted by asset id
  std::vector<AssetFailure> failures;
  std::optional<CrossSection> cross;

  /// Some asset failed outright or has an absent statistic.
  [[nodiscard]] bool partial() const;
};

/// Ingests every source and builds the report. Throws config_error for an
/// empty source list; per-asset failures are recorded, not thrown.
[[nodiscard]] Report run_report(const RunConfig& config);

/// Builds a report from prices already in memory, one per source.
[[nodiscard]] Report build_report(const RunConfig& config,
                                  const std::vector<std::pair<AssetSource, PriceSeries>>& inputs);

/// Cross-sectional stage on finished rows and hourly prices.
[[nodiscard]] CrossSection compute_cross_section(const RunConfig& config,
                                                 const std::vector<AssetResult>& assets,
                                                 const std::vector<PriceSeries>& prices);

/// Runs the same configuration on [from, cutoff) and [cutoff, to).
[[nodiscard]] std::pair<Report, Report> run_split_report(const RunConfig& config, Timestamp cutoff);

[[nodiscard]] const std::vector<std::string>& figure_ids();

/// Writes the delimited files behind one figure into `dir`. Throws
/// unknown_figure listing the valid ids.
std::vector<std::filesystem::path> emit_plot_data(const Report& report, std::string_view figure,
                                                  const std::filesystem::path& dir);

/// Table of rows, one line per asset, absent values written as NA.
[[nodiscard]] std::string facts_table_csv(const std::vector<StylizedFactsRow>& rows);
[[nodiscard]] std::vector<StylizedFactsRow> parse_facts_table(std::string_view text);

/// Feature table for clustering: every numeric column after zeros_pct, plus
/// zeros_pct when requested.
[[nodiscard]] FeatureTable facts_features(const std::vector<StylizedFactsRow>& rows,
                                          bool include_zeros);

/// Writes facts.csv, every figure and manifest.txt (key=value with the config
/// hash, seed and a SHA-256 per file). Returns the manifest path.
std::filesystem::path write_report(const Report& report, const std::filesystem::path& dir);

/// Recomputes every checksum listed in the manifest.
[[nodiscard]] bool verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace stylized
