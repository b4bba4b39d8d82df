#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stylized/timeseries.hpp"

namespace stylized {

struct CandleRecord {
  Timestamp timestamp_open = 0;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double volume = 0.0;

  /// Positive prices, low <= min(open, close), high >= max(open, close),
  /// nonnegative volume.
  [[nodiscard]] bool valid() const noexcept;
  bool operator==(const CandleRecord&) const = default;
};

enum class TimeUnit { seconds, milliseconds };

/// Column positions of one candle row. Used for delimited files and for the
/// array-of-arrays JSON that exchange endpoints return.
struct CandleSchema {
  char delimiter = ',';
  /// nullopt: skip the first line when its timestamp column is not numeric.
  std::optional<bool> header;
  int timestamp = 0;
  int open = 1;
  int high = 2;
  int low = 3;
  int close = 4;
  int volume = 5;
  TimeUnit unit = TimeUnit::seconds;

  /// `timestamp,open,high,low,close,volume`, epoch seconds.
  [[nodiscard]] static CandleSchema canonical() { return {}; }
  [[nodiscard]] int max_column() const noexcept;
};

struct ParseReport {
  std::vector<CandleRecord> records;  // sorted by timestamp, unique
  std::size_t rejected = 0;           // rows failing the OHLC invariants
  std::size_t duplicates = 0;         // earlier rows replaced by a later one
  std::vector<std::string> warnings;
};

/// Throws parse_error (with the 1-based line number) on malformed rows.
[[nodiscard]] ParseReport parse_candles(std::istream& in,
                                        const CandleSchema& schema = CandleSchema::canonical());
[[nodiscard]] ParseReport parse_candles_file(const std::filesystem::path& path,
                                             const CandleSchema& schema = CandleSchema::canonical());

/// Canonical text with a header line and shortest round-trip number formatting.
[[nodiscard]] std::string serialize_candles(std::span<const CandleRecord> records);
void write_candles_file(const std::filesystem::path& path, std::span<const CandleRecord> records);

/// Rows of an exchange JSON payload. Numbers may be JSON numbers or strings.
/// Invalid candles are skipped and counted in `rejected`.
[[nodiscard]] std::vector<CandleRecord> parse_json_candles(std::string_view body,
                                                           const CandleSchema& schema,
                                                           std::size_t* rejected = nullptr);

enum class PriceField { open, high, low, close };

struct SeriesGap {
  Timestamp after = 0;        // last timestamp before the gap
  std::int64_t missing = 0;   // number of absent grid points
};

struct PriceConversion {
  PriceSeries series;
  std::int64_t interval_seconds = 0;
  std::vector<SeriesGap> gaps;
};

/// Builds a price series stamped at candle open times. The interval is the
/// smallest spacing unless `expected_interval` is given; spacings that are
/// not a multiple of it throw parse_error, multiples are recorded as gaps.
[[nodiscard]] PriceConversion to_price_series(std::span<const CandleRecord> candles,
                                              std::string asset_id,
                                              PriceField field = PriceField::close,
                                              std::optional<std::int64_t> expected_interval = {});

struct SourceSpec {
  enum class Kind { file, http };

  Kind kind = Kind::file;
  /// File path, or a URL template with {symbol}, {interval}, {start}, {end},
  /// {start_ms}, {end_ms} and {limit} placeholders. {end} is the open time of
  /// the last candle in the page.
  std::string location;
  std::string venue;
  std::string symbol;
  std::int64_t interval_seconds = 3600;
  std::string interval_label;  // venue spelling, e.g. "1h"
  Timestamp start = 0;         // inclusive
  Timestamp end = 0;           // exclusive
  double rate_limit = 0.0;     // requests per second
  std::size_t page_size = 1000;
  CandleSchema columns;

  /// Throws config_error when an http source lacks a positive rate limit,
  /// page size or range.
  void validate() const;
};

/// Token bucket, one per host, shared by every fetch in the process.
class RateLimiter {
 public:
  explicit RateLimiter(double per_second, double burst = 1.0);
  void acquire();

  [[nodiscard]] static RateLimiter& for_host(const std::string& host, double per_second);

 private:
  std::mutex mutex_;
  double per_second_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

/// Candle files under `<root>/<venue>/<symbol>/<interval>/<start>-<end>`, in the
/// canonical format. Writes go through a temporary file and a rename.
class CandleCache {
 public:
  explicit CandleCache(std::filesystem::path root);

  [[nodiscard]] std::filesystem::path entry_path(const SourceSpec& spec) const;
  [[nodiscard]] std::optional<std::vector<CandleRecord>> load(const SourceSpec& spec) const;
  void store(const SourceSpec& spec, std::span<const CandleRecord> records) const;

 private:
  std::filesystem::path root_;
};

struct FetchOptions {
  bool allow_network = false;
  std::optional<std::filesystem::path> cache_dir;
  int max_retries = 5;
  std::chrono::milliseconds backoff_base{250};
  std::chrono::seconds timeout{30};
};

struct FetchResult {
  std::vector<CandleRecord> records;
  bool partial = false;  // some page came back empty
  bool from_cache = false;
  std::size_t requests = 0;
  std::size_t rejected = 0;
  int last_status = 0;
};

/// Expands a URL template for one page.
[[nodiscard]] std::string expand_url_template(const SourceSpec& spec, Timestamp page_start,
                                              Timestamp page_last_open, std::size_t limit);

/// Pages through [start, end) in `page_size`-candle requests under the host
/// rate limit, retrying transient failures (connection errors, 429, 5xx) with
/// exponential backoff. Complete results are cached; a warm cache answers
/// without any request. Throws network_disabled or fetch_failed.
[[nodiscard]] FetchResult fetch_candles(const SourceSpec& spec, const FetchOptions& options);

/// Reads a file source or fetches an http source, clipped to [start, end)
/// when a range is set.
[[nodiscard]] FetchResult load_candles(const SourceSpec& spec, const FetchOptions& options);

}  // namespace stylized
