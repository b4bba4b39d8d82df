#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "stylized/ingestion.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "stylized/error.hpp"
#include "stylized/hash.hpp"

namespace stylized {

bool CandleRecord::valid() const noexcept {
  const bool finite = std::isfinite(open) && std::isfinite(high) && std::isfinite(low) &&
                      std::isfinite(close) && std::isfinite(volume);
  return finite && open > 0.0 && high > 0.0 && low > 0.0 && close > 0.0 && volume >= 0.0 &&
         low <= std::min(open, close) && high >= std::max(open, close) && low <= high;
}

int CandleSchema::max_column() const noexcept {
  return std::max({timestamp, open, high, low, close, volume});
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::optional<double> to_double(std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

std::optional<Timestamp> to_timestamp(std::string_view s, TimeUnit unit) {
  s = trim(s);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    const auto d = to_double(s);
    if (!d || !std::isfinite(*d)) return std::nullopt;
    v = static_cast<std::int64_t>(std::floor(*d));
  }
  return unit == TimeUnit::milliseconds ? v / 1000 : v;
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

/// Sorts by timestamp and keeps the last record of each timestamp.
std::size_t sort_unique_last_wins(std::vector<CandleRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const CandleRecord& a, const CandleRecord& b) { return a.timestamp_open < b.timestamp_open; });
  std::vector<CandleRecord> out;
  out.reserve(records.size());
  std::size_t duplicates = 0;
  for (const auto& r : records) {
    if (!out.empty() && out.back().timestamp_open == r.timestamp_open) {
      out.back() = r;
      ++duplicates;
    } else {
      out.push_back(r);
    }
  }
  records = std::move(out);
  return duplicates;
}

}  // namespace

ParseReport parse_candles(std::istream& in, const CandleSchema& schema) {
  ParseReport report;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  const auto needed = static_cast<std::size_t>(schema.max_column()) + 1;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (trim(view).empty()) continue;
    const auto fields = split(view, schema.delimiter);
    if (first) {
      first = false;
      const bool skip = schema.header.has_value()
                            ? *schema.header
                            : (fields.size() <= static_cast<std::size_t>(schema.timestamp) ||
                               !to_timestamp(fields[static_cast<std::size_t>(schema.timestamp)], schema.unit));
      if (skip) continue;
    }
    if (fields.size() < needed) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                         std::to_string(needed) + " fields, got " +
                                         std::to_string(fields.size()));
    }
    auto field = [&](int idx) { return fields[static_cast<std::size_t>(idx)]; };
    const auto ts = to_timestamp(field(schema.timestamp), schema.unit);
    const auto o = to_double(field(schema.open));
    const auto h = to_double(field(schema.high));
    const auto l = to_double(field(schema.low));
    const auto c = to_double(field(schema.close));
    const auto v = to_double(field(schema.volume));
    if (!ts || !o || !h || !l || !c || !v) {
      throw Error(Errc::parse_error, "line " + std::to_string(line_no) + ": malformed number");
    }
    const CandleRecord rec{*ts, *o, *h, *l, *c, *v};
    if (!rec.valid()) {
      ++report.rejected;
      continue;
    }
    report.records.push_back(rec);
  }
  if (line_no == 0) report.warnings.emplace_back("empty input");
  report.duplicates = sort_unique_last_wins(report.records);
  if (report.duplicates > 0) {
    report.warnings.push_back(std::to_string(report.duplicates) + " duplicate timestamps, last row kept");
  }
  if (report.rejected > 0) {
    report.warnings.push_back(std::to_string(report.rejected) + " rows violate OHLC invariants");
  }
  return report;
}

ParseReport parse_candles_file(const std::filesystem::path& path, const CandleSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  return parse_candles(in, schema);
}

std::string serialize_candles(std::span<const CandleRecord> records) {
  std::string out = "timestamp,open,high,low,close,volume\n";
  for (const auto& r : records) {
    out += std::to_string(r.timestamp_open);
    for (double v : {r.open, r.high, r.low, r.close, r.volume}) {
      out.push_back(',');
      out += format_double(v);
    }
    out.push_back('\n');
  }
  return out;
}

void write_candles_file(const std::filesystem::path& path, std::span<const CandleRecord> records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io_error, "cannot write " + path.string());
  out << serialize_candles(records);
}

std::vector<CandleRecord> parse_json_candles(std::string_view body, const CandleSchema& schema,
                                             std::size_t* rejected) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::parse_error, std::string("candle payload is not JSON: ") + e.what());
  }
  if (!doc.is_array()) throw Error(Errc::parse_error, "candle payload is not an array");
  auto number = [](const nlohmann::json& v) -> std::optional<double> {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return to_double(v.get_ref<const std::string&>());
    return std::nullopt;
  };
  std::vector<CandleRecord> out;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& row = doc[i];
    if (!row.is_array() || row.size() <= static_cast<std::size_t>(schema.max_column())) {
      throw Error(Errc::parse_error, "candle row " + std::to_string(i) + " has too few columns");
    }
    auto at = [&](int idx) { return number(row[static_cast<std::size_t>(idx)]); };
    const auto ts = at(schema.timestamp);
    const auto o = at(schema.open), h = at(schema.high), l = at(schema.low), c = at(schema.close),
               v = at(schema.volume);
    if (!ts || !o || !h || !l || !c || !v) {
      throw Error(Errc::parse_error, "candle row " + std::to_string(i) + " has a non-numeric field");
    }
    auto t = static_cast<Timestamp>(std::floor(*ts));
    if (schema.unit == TimeUnit::milliseconds) t /= 1000;
    const CandleRecord rec{t, *o, *h, *l, *c, *v};
    if (rec.valid()) {
      out.push_back(rec);
    } else {
      ++bad;
    }
  }
  if (rejected != nullptr) *rejected += bad;
  return out;
}

PriceConversion to_price_series(std::span<const CandleRecord> candles, std::string asset_id,
                                PriceField field, std::optional<std::int64_t> expected_interval) {
  if (candles.empty()) throw Error(Errc::insufficient_data, asset_id + ": no candles");
  std::vector<CandleRecord> sorted(candles.begin(), candles.end());
  sort_unique_last_wins(sorted);

  std::int64_t interval = expected_interval.value_or(0);
  if (interval <= 0) {
    for (std::size_t i = 1; i < sorted.size(); ++i) {
      const auto d = sorted[i].timestamp_open - sorted[i - 1].timestamp_open;
      if (interval == 0 || d < interval) interval = d;
    }
    if (interval == 0) interval = 3600;
  }

  PriceConversion out;
  out.interval_seconds = interval;
  std::vector<PricePoint> points;
  points.reserve(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& c = sorted[i];
    if (i > 0) {
      const auto d = c.timestamp_open - sorted[i - 1].timestamp_open;
      if (d % interval != 0) {
        throw Error(Errc::parse_error, asset_id + ": spacing of " + std::to_string(d) +
                                           "s at t=" + std::to_string(c.timestamp_open) +
                                           " is not a multiple of " + std::to_string(interval) + "s");
      }
      if (d > interval) out.gaps.push_back({sorted[i - 1].timestamp_open, d / interval - 1});
    }
    double price = c.close;
    switch (field) {
      case PriceField::open: price = c.open; break;
      case PriceField::high: price = c.high; break;
      case PriceField::low: price = c.low; break;
      case PriceField::close: price = c.close; break;
    }
    points.push_back({c.timestamp_open, price});
  }
  out.series = PriceSeries(std::move(asset_id), interval, std::move(points));
  return out;
}

void SourceSpec::validate() const {
  if (location.empty()) throw Error(Errc::config_error, symbol + ": source location is empty");
  if (interval_seconds <= 0) throw Error(Errc::config_error, symbol + ": interval must be positive");
  if (kind == Kind::http) {
    if (!(rate_limit > 0.0)) throw Error(Errc::config_error, symbol + ": http source needs rate_limit > 0");
    if (page_size == 0) throw Error(Errc::config_error, symbol + ": page_size must be positive");
    if (end <= start) throw Error(Errc::config_error, symbol + ": http source needs a date range");
  }
}

RateLimiter::RateLimiter(double per_second, double burst)
    : per_second_(per_second), burst_(burst), tokens_(burst), last_(std::chrono::steady_clock::now()) {
  if (!(per_second > 0.0) || !(burst >= 1.0)) {
    throw Error(Errc::invalid_argument, "rate limiter needs a positive rate and burst >= 1");
  }
}

void RateLimiter::acquire() {
  while (true) {
    std::chrono::duration<double> wait{};
    {
      std::lock_guard lock(mutex_);
      const auto now = std::chrono::steady_clock::now();
      const std::chrono::duration<double> elapsed = now - last_;
      last_ = now;
      tokens_ = std::min(burst_, tokens_ + elapsed.count() * per_second_);
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / per_second_);
    }
    std::this_thread::sleep_for(wait);
  }
}

RateLimiter& RateLimiter::for_host(const std::string& host, double per_second) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<RateLimiter>> registry;
  std::lock_guard lock(registry_mutex);
  auto& slot = registry[host];
  if (!slot) slot = std::make_unique<RateLimiter>(per_second);
  return *slot;
}

CandleCache::CandleCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path CandleCache::entry_path(const SourceSpec& spec) const {
  return root_ / (spec.venue.empty() ? "default" : spec.venue) / spec.symbol /
         std::to_string(spec.interval_seconds) /
         (std::to_string(spec.start) + "-" + std::to_string(spec.end));
}

std::optional<std::vector<CandleRecord>> CandleCache::load(const SourceSpec& spec) const {
  const auto path = entry_path(spec);
  if (!std::filesystem::exists(path)) return std::nullopt;
  return parse_candles_file(path).records;
}

void CandleCache::store(const SourceSpec& spec, std::span<const CandleRecord> records) const {
  static std::mutex writer;
  std::lock_guard lock(writer);
  const auto path = entry_path(spec);
  auto tmp = path;
  tmp += ".tmp";
  write_candles_file(tmp, records);
  std::filesystem::rename(tmp, path);
}

std::string expand_url_template(const SourceSpec& spec, Timestamp page_start, Timestamp page_last_open,
                                std::size_t limit) {
  const std::map<std::string, std::string> values = {
      {"{symbol}", spec.symbol},
      {"{interval}", spec.interval_label.empty() ? std::to_string(spec.interval_seconds) : spec.interval_label},
      {"{start}", std::to_string(page_start)},
      {"{end}", std::to_string(page_last_open)},
      {"{start_ms}", std::to_string(page_start * 1000)},
      {"{end_ms}", std::to_string(page_last_open * 1000)},
      {"{limit}", std::to_string(limit)},
  };
  std::string url = spec.location;
  for (const auto& [key, value] : values) {
    for (auto pos = url.find(key); pos != std::string::npos; pos = url.find(key, pos + value.size())) {
      url.replace(pos, key.size(), value);
    }
  }
  return url;
}

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string host;
  std::string target;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(Errc::config_error, "URL without scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.base = url.substr(0, path_start);
  out.host = url.substr(scheme_end + 3, path_start == std::string::npos ? std::string::npos
                                                                        : path_start - scheme_end - 3);
  out.target = path_start == std::string::npos ? "/" : url.substr(path_start);
  return out;
}

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

FetchResult fetch_candles(const SourceSpec& spec, const FetchOptions& options) {
  spec.validate();
  if (spec.kind != SourceSpec::Kind::http) throw Error(Errc::config_error, "fetch_candles needs an http source");

  FetchResult result;
  std::optional<CandleCache> cache;
  if (options.cache_dir) {
    cache.emplace(*options.cache_dir);
    if (auto hit = cache->load(spec)) {
      result.records = std::move(*hit);
      result.from_cache = true;
      return result;
    }
  }
  if (!options.allow_network) {
    throw Error(Errc::network_disabled, spec.symbol + ": network access is disabled and the cache is cold");
  }

  const auto iv = spec.interval_seconds;
  const auto n_candles = (spec.end - spec.start + iv - 1) / iv;
  const auto page = static_cast<std::int64_t>(spec.page_size);
  const Timestamp last_open = spec.start + (n_candles - 1) * iv;

  std::vector<CandleRecord> all;
  for (std::int64_t first = 0; first < n_candles; first += page) {
    const Timestamp page_start = spec.start + first * iv;
    const Timestamp page_last = std::min(page_start + (page - 1) * iv, last_open);
    const auto url = split_url(expand_url_template(spec, page_start, page_last, spec.page_size));
    auto& limiter = RateLimiter::for_host(url.host, spec.rate_limit);

    httplib::Client client(url.base);
    client.set_connection_timeout(options.timeout);
    client.set_read_timeout(options.timeout);
    client.set_follow_location(true);

    std::optional<std::string> body;
    for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
      if (attempt > 0) std::this_thread::sleep_for(options.backoff_base * (1 << (attempt - 1)));
      limiter.acquire();
      ++result.requests;
      auto res = client.Get(url.target);
      if (!res) {
        result.last_status = 0;
        continue;
      }
      result.last_status = res->status;
      if (res->status == 200) {
        body = res->body;
        break;
      }
      if (!transient(res->status)) break;
    }
    if (!body) {
      throw Error(Errc::fetch_failed, spec.symbol + ": page at " + std::to_string(page_start) +
                                          " failed, last status " + std::to_string(result.last_status));
    }
    auto rows = parse_json_candles(*body, spec.columns, &result.rejected);
    if (rows.empty()) result.partial = true;
    all.insert(all.end(), rows.begin(), rows.end());
  }

  std::erase_if(all, [&](const CandleRecord& r) { return r.timestamp_open < spec.start || r.timestamp_open >= spec.end; });
  sort_unique_last_wins(all);
  result.records = std::move(all);
  if (cache && !result.partial) cache->store(spec, result.records);
  return result;
}

FetchResult load_candles(const SourceSpec& spec, const FetchOptions& options) {
  spec.validate();
  if (spec.kind == SourceSpec::Kind::http) return fetch_candles(spec, options);
  auto parsed = parse_candles_file(spec.location, spec.columns);
  FetchResult result;
  result.rejected = parsed.rejected;
  result.records = std::move(parsed.records);
  if (spec.end > spec.start) {
    std::erase_if(result.records, [&](const CandleRecord& r) {
      return r.timestamp_open < spec.start || r.timestamp_open >= spec.end;
    });
  }
  return result;
}

}  // namespace stylized
