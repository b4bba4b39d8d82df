#include "stylized/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "stylized/error.hpp"
#include "stylized/hash.hpp"

namespace stylized {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Rows

const std::vector<std::string>& StylizedFactsRow::numeric_columns() {
  static const std::vector<std::string> cols = {
      "zeros_pct",   "avg_acf_1_24", "avg_acf_else", "volclust_slope", "volclust_intercept",
      "avg_lev_pos", "avg_lev_neg",  "tra_ini",      "tra_fin",        "cdf_tail_right",
      "cdf_tail_left", "jb_slope"};
  return cols;
}

Field& StylizedFactsRow::field(std::string_view column) {
  if (column == "zeros_pct") return zeros_pct;
  if (column == "avg_acf_1_24") return avg_acf_1_24;
  if (column == "avg_acf_else") return avg_acf_else;
  if (column == "volclust_slope") return volclust_slope;
  if (column == "volclust_intercept") return volclust_intercept;
  if (column == "avg_lev_pos") return avg_lev_pos;
  if (column == "avg_lev_neg") return avg_lev_neg;
  if (column == "tra_ini") return tra_ini;
  if (column == "tra_fin") return tra_fin;
  if (column == "cdf_tail_right") return cdf_tail_right;
  if (column == "cdf_tail_left") return cdf_tail_left;
  if (column == "jb_slope") return jb_slope;
  throw Error(Errc::invalid_argument, "unknown column " + std::string(column));
}

const Field& StylizedFactsRow::field(std::string_view column) const {
  return const_cast<StylizedFactsRow*>(this)->field(column);
}

bool StylizedFactsRow::complete() const {
  return std::all_of(numeric_columns().begin(), numeric_columns().end(),
                     [&](const std::string& c) { return field(c).present(); });
}

bool Report::partial() const {
  if (!failures.empty()) return true;
  return std::any_of(assets.begin(), assets.end(), [](const AssetResult& a) { return !a.row.complete(); });
}

// ---------------------------------------------------------------------------
// Dates and configuration

Timestamp parse_date(std::string_view text) {
  const auto bad = [&] { return Error(Errc::config_error, "bad date '" + std::string(text) + "'"); };
  if (text.empty()) throw bad();
  if (text.find('-', 1) == std::string_view::npos) {
    Timestamp v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) throw bad();
    return v;
  }
  int y = 0;
  unsigned mo = 0, d = 0, hh = 0, mm = 0, ss = 0;
  auto num = [&](std::size_t pos, std::size_t len, auto& out) {
    if (pos + len > text.size()) throw bad();
    const auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
    if (ec != std::errc() || ptr != text.data() + pos + len) throw bad();
  };
  if (text.size() < 10 || text[4] != '-' || text[7] != '-') throw bad();
  num(0, 4, y);
  num(5, 2, mo);
  num(8, 2, d);
  if (text.size() > 10) {
    if (text.size() != 20 || (text[10] != 'T' && text[10] != ' ') || text[13] != ':' ||
        text[16] != ':' || text[19] != 'Z') {
      throw bad();
    }
    num(11, 2, hh);
    num(14, 2, mm);
    num(17, 2, ss);
    if (hh > 23 || mm > 59 || ss > 59) throw bad();
  }
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{mo}, std::chrono::day{d}};
  if (!ymd.ok()) throw bad();
  const auto days = std::chrono::sys_days(ymd).time_since_epoch().count();
  return static_cast<Timestamp>(days) * 86400 + hh * 3600 + mm * 60 + ss;
}

std::string format_date(Timestamp t) {
  const auto days = static_cast<int>((t >= 0 ? t : t - 86399) / 86400);
  const auto secs = t - static_cast<Timestamp>(days) * 86400;
  const std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
  char buf[32];
  if (secs == 0) {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  } else {
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(secs / 3600), static_cast<int>(secs / 60 % 60),
                  static_cast<int>(secs % 60));
  }
  return buf;
}

SessionCalendar make_calendar(CalendarKind kind, std::int64_t day_offset_seconds) {
  return kind == CalendarKind::us_equity ? SessionCalendar::us_equity()
                                         : SessionCalendar::always_open(day_offset_seconds);
}

namespace {

std::int64_t parse_interval(const json& v) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (!v.is_string()) throw Error(Errc::config_error, "interval must be seconds or a label like 1h");
  const auto s = v.get<std::string>();
  std::int64_t n = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), n);
  if (ec != std::errc() || n <= 0) throw Error(Errc::config_error, "bad interval '" + s + "'");
  const std::string unit(ptr, s.data() + s.size());
  if (unit.empty() || unit == "s") return n;
  if (unit == "m") return n * 60;
  if (unit == "h") return n * 3600;
  if (unit == "d") return n * 86400;
  if (unit == "w") return n * 7 * 86400;
  throw Error(Errc::config_error, "bad interval unit in '" + s + "'");
}

CandleSchema parse_schema(const json& obj) {
  CandleSchema s;
  if (!obj.is_object()) return s;
  if (obj.contains("delimiter")) {
    const auto d = obj.at("delimiter").get<std::string>();
    if (d.size() != 1) throw Error(Errc::config_error, "delimiter must be one character");
    s.delimiter = d[0];
  }
  if (obj.contains("header")) s.header = obj.at("header").get<bool>();
  s.timestamp = obj.value("timestamp", s.timestamp);
  s.open = obj.value("open", s.open);
  s.high = obj.value("high", s.high);
  s.low = obj.value("low", s.low);
  s.close = obj.value("close", s.close);
  s.volume = obj.value("volume", s.volume);
  const auto unit = obj.value("unit", std::string("s"));
  if (unit == "ms" || unit == "milliseconds") {
    s.unit = TimeUnit::milliseconds;
  } else if (unit != "s" && unit != "seconds") {
    throw Error(Errc::config_error, "timestamp unit must be s or ms");
  }
  for (int c : {s.timestamp, s.open, s.high, s.low, s.close, s.volume}) {
    if (c < 0) throw Error(Errc::config_error, "column indices must be nonnegative");
  }
  return s;
}

json schema_json(const CandleSchema& s) {
  json j = {{"delimiter", std::string(1, s.delimiter)},
            {"timestamp", s.timestamp},
            {"open", s.open},
            {"high", s.high},
            {"low", s.low},
            {"close", s.close},
            {"volume", s.volume},
            {"unit", s.unit == TimeUnit::milliseconds ? "ms" : "s"}};
  j["header"] = s.header ? json(*s.header) : json(nullptr);
  return j;
}

template <class T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("bad value for '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

json load_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, path.string() + ": " + e.what());
  }
}

AssetSource parse_source(const json& entry, const std::map<std::string, json>& venues,
                         const std::filesystem::path& base_dir) {
  if (!entry.is_object()) throw Error(Errc::config_error, "each source must be an object");
  json merged = json::object();
  if (entry.contains("venue")) {
    const auto name = entry.at("venue").get<std::string>();
    if (auto it = venues.find(name); it != venues.end()) merged = it->second;
    merged["venue"] = name;
  }
  for (const auto& [k, v] : entry.items()) merged[k] = v;

  AssetSource src;
  src.id = get_or<std::string>(merged, "id", "");
  if (src.id.empty()) throw Error(Errc::config_error, "source without an id");
  src.sector = get_or<std::string>(merged, "sector", "");
  const auto cal = get_or<std::string>(merged, "calendar", "always_open");
  if (cal == "us_equity") {
    src.calendar = CalendarKind::us_equity;
  } else if (cal != "always_open") {
    throw Error(Errc::config_error, src.id + ": calendar must be always_open or us_equity");
  }

  auto& spec = src.source;
  spec.venue = get_or<std::string>(merged, "venue", "");
  spec.symbol = get_or<std::string>(merged, "symbol", src.id);
  if (merged.contains("url")) {
    spec.kind = SourceSpec::Kind::http;
    spec.location = merged.at("url").get<std::string>();
  } else if (merged.contains("path")) {
    spec.kind = SourceSpec::Kind::file;
    spec.location = resolve(base_dir, merged.at("path").get<std::string>()).string();
  } else {
    throw Error(Errc::config_error, src.id + ": source needs a path or a url");
  }
  if (merged.contains("interval")) {
    const auto& iv = merged.at("interval");
    spec.interval_seconds = parse_interval(iv);
    if (iv.is_string()) spec.interval_label = iv.get<std::string>();
    if (merged.contains("interval_labels") && iv.is_string()) {
      const auto& labels = merged.at("interval_labels");
      if (labels.contains(spec.interval_label)) spec.interval_label = labels.at(spec.interval_label).get<std::string>();
    }
  }
  spec.rate_limit = get_or<double>(merged, "rate_limit", 0.0);
  spec.page_size = get_or<std::size_t>(merged, "page_size", 1000);
  spec.columns = parse_schema(merged.value("columns", json::object()));
  return src;
}

}  // namespace

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::config_error, std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::config_error, "config must be a JSON object");

  RunConfig c;
  if (doc.contains("from")) {
    const auto& v = doc.at("from");
    c.from = v.is_number_integer() ? v.get<Timestamp>() : parse_date(v.get<std::string>());
  }
  if (doc.contains("to")) {
    const auto& v = doc.at("to");
    c.to = v.is_number_integer() ? v.get<Timestamp>() : parse_date(v.get<std::string>());
  }
  if (c.from && c.to && *c.from >= *c.to) throw Error(Errc::config_error, "from must precede to");

  c.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "report"));
  if (doc.contains("cache_dir")) c.cache_dir = resolve(base_dir, doc.at("cache_dir").get<std::string>());
  c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
  c.threads = get_or<unsigned>(doc, "threads", c.threads);
  c.allow_network = get_or<bool>(doc, "allow_network", c.allow_network);

  const auto analysis = doc.value("analysis", json::object());
  c.jb_horizons_days = get_or<std::vector<double>>(analysis, "jb_horizons_days", c.jb_horizons_days);
  c.acf_max_lag = get_or<int>(analysis, "acf_max_lag", c.acf_max_lag);
  c.lev_max_lag = get_or<int>(analysis, "lev_max_lag", c.lev_max_lag);
  c.vol_min_lag = get_or<int>(analysis, "vol_min_lag", c.vol_min_lag);
  c.vol_max_lag = get_or<int>(analysis, "vol_max_lag", c.vol_max_lag);
  c.vol_min_scaled = get_or<double>(analysis, "vol_min_scaled", c.vol_min_scaled);
  c.tail_threshold = get_or<double>(analysis, "tail_threshold", c.tail_threshold);
  c.tail_min_r2 = get_or<double>(analysis, "tail_min_r2", c.tail_min_r2);
  c.tra_max_n = get_or<int>(analysis, "tra_max_n", c.tra_max_n);
  c.day_offset_seconds = get_or<std::int64_t>(analysis, "day_offset_seconds", c.day_offset_seconds);

  const auto clustering = doc.value("clustering", json::object());
  c.n_clusters = get_or<std::size_t>(clustering, "n_clusters", c.n_clusters);
  c.cluster_include_zeros = get_or<bool>(clustering, "include_zeros", c.cluster_include_zeros);

  const auto cross = doc.value("cross_section", json::object());
  c.rolling_window = get_or<std::size_t>(cross, "rolling_window", c.rolling_window);
  c.bootstrap_sample = get_or<std::size_t>(cross, "bootstrap_sample", c.bootstrap_sample);
  c.bootstrap_trials = get_or<std::size_t>(cross, "bootstrap_trials", c.bootstrap_trials);
  c.bootstrap_with_replacement = get_or<bool>(cross, "with_replacement", c.bootstrap_with_replacement);

  std::map<std::string, json> venues;
  const auto venue_maps = doc.value("venues", json::object());
  for (const auto& [name, v] : venue_maps.items()) {
    venues[name] = v.is_string() ? load_json_file(resolve(base_dir, v.get<std::string>())) : v;
  }

  std::set<std::string> seen;
  const auto source_list = doc.value("sources", json::array());
  for (const auto& entry : source_list) {
    auto src = parse_source(entry, venues, base_dir);
    if (!seen.insert(src.id).second) throw Error(Errc::config_error, "duplicate source id " + src.id);
    if (c.from) src.source.start = *c.from;
    if (c.to) src.source.end = *c.to;
    c.sources.push_back(std::move(src));
  }

  if (c.acf_max_lag < 24) throw Error(Errc::config_error, "acf_max_lag must be at least 24");
  if (c.lev_max_lag < 1 || c.tra_max_n < 1) throw Error(Errc::config_error, "lag limits must be positive");
  if (c.vol_min_lag < 1 || c.vol_max_lag < c.vol_min_lag) throw Error(Errc::config_error, "bad volatility lag range");
  if (!(c.tail_threshold > 0.0)) throw Error(Errc::config_error, "tail_threshold must be positive");
  if (c.n_clusters < 1) throw Error(Errc::config_error, "n_clusters must be positive");
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::config_error, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : ".");
}

std::string config_hash(const RunConfig& c) {
  json sources = json::array();
  for (const auto& s : c.sources) {
    sources.push_back({{"id", s.id},
                       {"sector", s.sector},
                       {"calendar", s.calendar == CalendarKind::us_equity ? "us_equity" : "always_open"},
                       {"kind", s.source.kind == SourceSpec::Kind::http ? "http" : "file"},
                       {"location", s.source.location},
                       {"venue", s.source.venue},
                       {"symbol", s.source.symbol},
                       {"interval", s.source.interval_seconds},
                       {"start", s.source.start},
                       {"end", s.source.end},
                       {"columns", schema_json(s.source.columns)}});
  }
  json j = {{"sources", sources},
            {"from", c.from ? json(*c.from) : json(nullptr)},
            {"to", c.to ? json(*c.to) : json(nullptr)},
            {"jb_horizons_days", c.jb_horizons_days},
            {"acf_max_lag", c.acf_max_lag},
            {"lev_max_lag", c.lev_max_lag},
            {"vol_min_lag", c.vol_min_lag},
            {"vol_max_lag", c.vol_max_lag},
            {"vol_min_scaled", c.vol_min_scaled},
            {"tail_threshold", c.tail_threshold},
            {"tail_min_r2", c.tail_min_r2},
            {"tra_max_n", c.tra_max_n},
            {"day_offset_seconds", c.day_offset_seconds},
            {"n_clusters", c.n_clusters},
            {"cluster_include_zeros", c.cluster_include_zeros},
            {"rolling_window", c.rolling_window},
            {"bootstrap_sample", c.bootstrap_sample},
            {"bootstrap_trials", c.bootstrap_trials},
            {"bootstrap_with_replacement", c.bootstrap_with_replacement},
            {"seed", c.seed}};
  return sha256_hex(j.dump());
}

// ---------------------------------------------------------------------------
// Per-asset pipeline

namespace {

constexpr std::int64_t kHour = 3600;
constexpr std::int64_t kDay = 86400;
constexpr std::int64_t kMinHistory = 60 * kDay;

template <class Fn>
void guarded(StylizedFactsRow& row, std::initializer_list<Field*> fields, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    for (auto* f : fields) {
      f->value.reset();
      f->reason = std::string(to_string(e.code()));
    }
  } catch (const std::exception&) {
    for (auto* f : fields) {
      f->value.reset();
      f->reason = "internal_error";
    }
  }
  (void)row;
}

PriceSeries to_hourly(const PriceSeries& prices) {
  const auto iv = prices.interval_seconds();
  if (iv == kHour) return prices;
  if (iv < kHour && kHour % iv == 0) return resample_last(prices, kHour);
  throw Error(Errc::invalid_argument,
              prices.asset_id() + ": needs hourly or finer prices, got " + std::to_string(iv) + "s");
}

}  // namespace

AssetResult compute_asset(const PriceSeries& prices, const AssetSource& meta, const RunConfig& config) {
  if (prices.size() < 2 ||
      prices.points().back().time - prices.points().front().time < kMinHistory) {
    throw Error(Errc::insufficient_data, meta.id + ": history shorter than 60 days");
  }
  AssetResult out;
  auto& row = out.row;
  auto& detail = out.detail;
  row.asset_id = meta.id;
  row.sector = meta.sector;
  row.history_start = prices.points().front().time;
  row.history_end = prices.points().back().time;

  const auto hourly = to_hourly(prices);
  const auto cal = make_calendar(meta.calendar, config.day_offset_seconds);
  const auto returns = log_returns(hourly, kHour);
  const auto in_session = session_filter(returns, cal);
  detail.hourly = in_session;

  guarded(row, {&row.zeros_pct}, [&] {
    if (in_session.empty()) throw Error(Errc::insufficient_data, "no in-session returns");
    row.zeros_pct.value = 100.0 * zero_fraction(in_session);
  });

  guarded(row, {&row.avg_acf_1_24, &row.avg_acf_else}, [&] {
    detail.acf_returns = session_acf(returns, cal, config.acf_max_lag);
    const auto s = acf_summary(*detail.acf_returns);
    row.avg_acf_1_24.value = s.avg_1_24;
    row.avg_acf_else.value = s.avg_else;
  });

  try {
    detail.acf_abs = session_acf(absolute(returns), cal, config.acf_max_lag);
  } catch (const Error&) {
  }

  guarded(row, {&row.volclust_slope, &row.volclust_intercept}, [&] {
    detail.vol_fit = vol_cluster_fit(returns, cal, config.vol_min_lag, config.vol_max_lag,
                                     config.vol_min_scaled);
    row.volclust_slope.value = detail.vol_fit->slope;
    row.volclust_intercept.value = detail.vol_fit->intercept;
  });

  guarded(row, {&row.avg_lev_pos, &row.avg_lev_neg}, [&] {
    detail.leverage = leverage(in_session, config.lev_max_lag);
    const auto s = leverage_summary(*detail.leverage);
    row.avg_lev_pos.value = s.avg_pos;
    row.avg_lev_neg.value = s.avg_neg;
  });

  guarded(row, {&row.tra_ini, &row.tra_fin}, [&] {
    detail.tra = tra(returns, cal, config.tra_max_n);
    row.tra_ini.value = detail.tra->initial();
    row.tra_fin.value = detail.tra->final();
  });

  std::optional<ReturnSeries> norm;
  guarded(row, {&row.cdf_tail_right, &row.cdf_tail_left}, [&] { norm = normalize(in_session); });
  if (norm) {
    detail.mountain = mountain_cdf(*norm);
    const std::pair<TailSide, Field*> sides[] = {{TailSide::right, &row.cdf_tail_right},
                                                 {TailSide::left, &row.cdf_tail_left}};
    for (const auto& [side, f] : sides) {
      const char* name = side == TailSide::right ? "cdf_tail_right" : "cdf_tail_left";
      guarded(row, {f}, [&, side = side, f = f] {
        const auto power = fit_power_tail(*norm, side, config.tail_threshold);
        detail.power_fits.push_back(power);
        if (!(power.exponent > 0.0)) throw Error(Errc::degenerate_series, "nonpositive tail exponent");
        f->value = power.exponent;
        bool weak = power.r_squared < config.tail_min_r2;
        try {
          const auto expo = fit_exponential_tail(*norm, side, config.tail_threshold);
          detail.exp_fits.push_back(expo);
          weak = weak || expo.r_squared > power.r_squared;
        } catch (const Error&) {
        }
        if (weak) row.flags.push_back(std::string(name) + ":low_r2");
      });
    }
  }

  guarded(row, {&row.jb_slope}, [&] {
    detail.jb = jb_scan(hourly, config.jb_horizons_days);
    row.jb_slope.value = detail.jb->slope;
    if (detail.jb->has_dropped()) row.flags.emplace_back("jb_slope:dropped_horizons");
  });

  if (meta.calendar == CalendarKind::us_equity) row.flags.emplace_back("calendar:us_equity");
  return out;
}

StylizedFactsRow compute_row(const PriceSeries& prices, const RunConfig& config) {
  AssetSource meta;
  meta.id = prices.asset_id();
  for (const auto& s : config.sources) {
    if (s.id == meta.id) meta = s;
  }
  return compute_asset(prices, meta, config).row;
}

// ---------------------------------------------------------------------------
// Cross-section

FeatureTable facts_features(const std::vector<StylizedFactsRow>& rows, bool include_zeros) {
  FeatureTable t;
  for (const auto& c : StylizedFactsRow::numeric_columns()) {
    if (c == "zeros_pct" && !include_zeros) continue;
    t.column_names.push_back(c);
  }
  for (const auto& r : rows) {
    t.row_labels.push_back(r.asset_id);
    std::vector<std::optional<double>> values;
    for (const auto& c : t.column_names) values.push_back(r.field(c).value);
    t.rows.push_back(std::move(values));
  }
  return t;
}

CrossSection compute_cross_section(const RunConfig& config, const std::vector<AssetResult>& assets,
                                   const std::vector<PriceSeries>& prices) {
  CrossSection cs;
  std::vector<ReturnSeries> daily;
  for (const auto& p : prices) {
    try {
      daily.push_back(log_returns(resample_last(p, kDay), kDay));
    } catch (const Error& e) {
      cs.notes.push_back(p.asset_id() + ": no daily returns (" + std::string(to_string(e.code())) + ")");
    }
  }
  if (daily.size() < 2) throw Error(Errc::insufficient_data, "cross-section needs at least 2 assets with daily returns");
  cs.daily_panel = align_panel(daily);
  const auto& panel = cs.daily_panel;
  if (panel.underdetermined()) {
    cs.notes.push_back("fewer daily observations than assets; correlation matrix is rank-deficient");
  }

  std::optional<MatrixCache> cache;
  std::string key;
  if (config.cache_dir) {
    cache.emplace(*config.cache_dir / "correlation");
    key = panel_hash(panel);
    if (auto hit = cache->load(key)) cs.correlation = std::move(*hit);
  }
  if (cs.correlation.rows() == 0) {
    cs.correlation = correlation_matrix(panel);
    if (cache) cache->store(key, cs.correlation);
  }
  cs.eigen = eigen_spectrum(cs.correlation, panel.n_times());

  if (config.bootstrap_trials > 0) {
    auto sample = config.bootstrap_sample;
    if (!config.bootstrap_with_replacement) sample = std::min(sample, panel.n_assets());
    cs.bootstrap = bootstrap_spectrum(panel, sample, config.bootstrap_trials, config.seed,
                                      config.bootstrap_with_replacement, config.threads);
  }

  try {
    cs.rolling = rolling_first_eigen(panel, config.rolling_window);
  } catch (const Error& e) {
    cs.notes.push_back(std::string("rolling eigenvalue skipped: ") + e.what());
  }

  std::vector<StylizedFactsRow> rows;
  for (const auto& a : assets) rows.push_back(a.row);
  try {
    auto dist = stylized_distance_matrix(facts_features(rows, config.cluster_include_zeros));
    auto clusters = hierarchical_cluster(dist, std::min(config.n_clusters, dist.labels.size()));
    dist.linkage_order = clusters.leaf_order;
    cs.distance = std::move(dist);
    cs.clustering = std::move(clusters);
  } catch (const Error& e) {
    cs.notes.push_back(std::string("clustering skipped: ") + e.what());
  }
  return cs;
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

struct Slot {
  std::optional<AssetResult> result;
  std::optional<AssetFailure> failure;
};

PriceSeries clip(const PriceSeries& p, const RunConfig& config) {
  if (!config.from && !config.to) return p;
  return p.window(config.from.value_or(std::numeric_limits<Timestamp>::min()),
                  config.to.value_or(std::numeric_limits<Timestamp>::max()));
}

AssetFailure failure_of(const std::string& id, const std::exception& ex) {
  if (const auto* e = dynamic_cast<const Error*>(&ex)) return {id, std::string(to_string(e->code())), e->what()};
  return {id, "internal_error", ex.what()};
}

Report assemble(const RunConfig& config, const std::vector<std::pair<AssetSource, PriceSeries>>& inputs,
                std::vector<AssetFailure> failures) {
  Report report;
  report.config = config;
  std::vector<Slot> slots(inputs.size());
  std::vector<PriceSeries> clipped(inputs.size());

  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      const auto& [meta, prices] = inputs[i];
      try {
        clipped[i] = clip(prices, config);
        slots[i].result = compute_asset(clipped[i], meta, config);
      } catch (const std::exception& e) {
        slots[i].failure = failure_of(meta.id, e);
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const auto n_threads = std::min<std::size_t>(config.threads ? config.threads : hw, inputs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(work);
    work();
  }

  std::vector<std::size_t> order(inputs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return inputs[a].first.id < inputs[b].first.id; });

  std::vector<PriceSeries> ok_prices;
  for (auto i : order) {
    if (slots[i].result) {
      report.assets.push_back(std::move(*slots[i].result));
      ok_prices.push_back(clipped[i]);
    } else if (slots[i].failure) {
      failures.push_back(std::move(*slots[i].failure));
    }
  }
  std::sort(failures.begin(), failures.end(),
            [](const AssetFailure& a, const AssetFailure& b) { return a.asset_id < b.asset_id; });
  report.failures = std::move(failures);

  if (report.assets.size() >= 2) {
    try {
      report.cross = compute_cross_section(config, report.assets, ok_prices);
    } catch (const std::exception& e) {
      report.failures.push_back(failure_of("cross_section", e));
    }
  }
  return report;
}

}  // namespace

Report build_report(const RunConfig& config, const std::vector<std::pair<AssetSource, PriceSeries>>& inputs) {
  if (inputs.empty()) throw Error(Errc::config_error, "no sources to report on");
  return assemble(config, inputs, {});
}

Report run_report(const RunConfig& config) {
  if (config.sources.empty()) throw Error(Errc::config_error, "config lists no sources");
  FetchOptions options;
  options.allow_network = config.allow_network;
  if (config.cache_dir) options.cache_dir = *config.cache_dir / "candles";

  std::vector<std::pair<AssetSource, PriceSeries>> inputs;
  std::vector<AssetFailure> failures;
  for (auto src : config.sources) {
    if (config.from) src.source.start = *config.from;
    if (config.to) src.source.end = *config.to;
    try {
      const auto fetched = load_candles(src.source, options);
      if (fetched.partial) failures.push_back({src.id, "partial_fetch", "some pages came back empty"});
      auto conv = to_price_series(fetched.records, src.id, PriceField::close, src.source.interval_seconds);
      inputs.emplace_back(src, std::move(conv.series));
    } catch (const std::exception& e) {
      failures.push_back(failure_of(src.id, e));
    }
  }
  return assemble(config, inputs, std::move(failures));
}

std::pair<Report, Report> run_split_report(const RunConfig& config, Timestamp cutoff) {
  if ((config.from && cutoff <= *config.from) || (config.to && cutoff >= *config.to)) {
    throw Error(Errc::config_error, "split cutoff must lie inside the date window");
  }
  auto before = config;
  auto after = config;
  before.to = cutoff;
  after.from = cutoff;
  before.output_dir /= "before";
  after.output_dir /= "after";
  return {run_report(before), run_report(after)};
}

// ---------------------------------------------------------------------------
// Tables

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(std::string_view line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        out.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.emplace_back();
    } else if (c != '\r') {
      out.back() += c;
    }
  }
  return out;
}

std::string num(double v) { return std::isfinite(v) ? format_double(v) : "NA"; }

std::string join(const std::vector<std::string>& parts, char sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

std::string facts_table_csv(const std::vector<StylizedFactsRow>& rows) {
  std::string out = "asset_id,sector,history_start,history_end";
  for (const auto& c : StylizedFactsRow::numeric_columns()) out += "," + c;
  out += ",reasons,flags\n";
  for (const auto& r : rows) {
    out += csv_quote(r.asset_id) + "," + csv_quote(r.sector) + "," + format_date(r.history_start) + "," +
           format_date(r.history_end);
    std::vector<std::string> reasons;
    for (const auto& c : StylizedFactsRow::numeric_columns()) {
      const auto& f = r.field(c);
      out += "," + (f.value ? num(*f.value) : std::string("NA"));
      if (!f.value) reasons.push_back(c + "=" + (f.reason.empty() ? "unknown" : f.reason));
    }
    out += "," + csv_quote(join(reasons, ';')) + "," + csv_quote(join(r.flags, ';')) + "\n";
  }
  return out;
}

std::vector<StylizedFactsRow> parse_facts_table(std::string_view text) {
  std::vector<StylizedFactsRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) return rows;
  const auto header = csv_split(line);
  const auto& cols = StylizedFactsRow::numeric_columns();
  const auto width = 4 + cols.size() + 2;
  if (header.size() != width || header[0] != "asset_id") {
    throw Error(Errc::parse_error, "facts table header does not match");
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = csv_split(line);
    if (f.size() != width) {
      throw Error(Errc::parse_error, "facts table line " + std::to_string(line_no) + " has " +
                                         std::to_string(f.size()) + " fields");
    }
    StylizedFactsRow r;
    r.asset_id = f[0];
    r.sector = f[1];
    r.history_start = parse_date(f[2]);
    r.history_end = parse_date(f[3]);
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const auto& cell = f[4 + i];
      if (cell == "NA") continue;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size()) {
        throw Error(Errc::parse_error, "facts table line " + std::to_string(line_no) + ": bad number " + cell);
      }
      r.field(cols[i]).value = v;
    }
    for (const auto& kv : split_on(f[4 + cols.size()], ';')) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) continue;
      r.field(kv.substr(0, eq)).reason = kv.substr(eq + 1);
    }
    r.flags = split_on(f[5 + cols.size()], ';');
    rows.push_back(std::move(r));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Figures

const std::vector<std::string>& figure_ids() {
  static const std::vector<std::string> ids = {
      "mountain_cdf",       "acf_returns",    "acf_abs_returns", "leverage",
      "tra",                "jb_scan",        "tail_fits",       "correlation_matrix",
      "eigen_spectrum",     "bootstrap_spectrum", "rolling_eigen", "distance_matrix",
      "cluster"};
  return ids;
}

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::string file_safe(const std::string& id) {
  std::string out = id;
  for (auto& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return out;
}

class FigureWriter {
 public:
  FigureWriter(std::filesystem::path dir, std::string figure)
      : dir_(std::move(dir)), figure_(std::move(figure)) {}

  /// Starts a file with '#' lines describing the figure and a column header.
  void open(const std::string& suffix, const std::vector<std::string>& notes, const std::string& columns) {
    flush();
    path_ = dir_ / (figure_ + (suffix.empty() ? "" : "_" + file_safe(suffix)) + ".csv");
    body_ = "# figure: " + figure_ + "\n";
    for (const auto& n : notes) body_ += "# " + n + "\n";
    body_ += columns + "\n";
  }
  void row(const std::vector<std::string>& cells) { body_ += join(cells, ',') + "\n"; }

  std::vector<std::filesystem::path> finish() {
    flush();
    return std::move(written_);
  }

 private:
  void flush() {
    if (path_.empty()) return;
    std::filesystem::create_directories(dir_);
    std::ofstream out(path_, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + path_.string());
    out << body_;
    written_.push_back(path_);
    path_.clear();
  }

  std::filesystem::path dir_;
  std::string figure_;
  std::filesystem::path path_;
  std::string body_;
  std::vector<std::filesystem::path> written_;
};

std::string sz(std::size_t v) { return std::to_string(v); }

void emit_acf(FigureWriter& w, const std::string& asset, const AcfResult& acf, const VolClusterFit* fit,
              const char* what) {
  w.open(asset, {std::string("asset: ") + asset, std::string("series: ") + what,
                 "x: lag (hours)", "acf: per-lag Pearson correlation over the pair set",
                 "acf_scaled: acf * sqrt(count)", "band: +/-3 significance line on acf_scaled",
                 fit ? "fit: 10^(intercept + slope * log10 lag) from the volatility-clustering fit"
                     : "fit: NA"},
         "lag,acf,acf_scaled,count,band,fit");
  for (std::size_t i = 0; i < acf.lags.size(); ++i) {
    const double lag = acf.lags[i];
    const std::string fitted =
        fit ? num(std::pow(10.0, fit->intercept + fit->slope * std::log10(lag))) : "NA";
    w.row({std::to_string(acf.lags[i]), num(acf.values[i]), num(acf.scaled_values[i]),
           sz(acf.pair_counts[i]), "3", fitted});
  }
}

}  // namespace

std::vector<std::filesystem::path> emit_plot_data(const Report& report, std::string_view figure,
                                                  const std::filesystem::path& dir) {
  const auto& ids = figure_ids();
  if (std::find(ids.begin(), ids.end(), figure) == ids.end()) {
    std::vector<std::string> sorted = ids;
    std::stable_sort(sorted.begin(), sorted.end(), [&](const std::string& a, const std::string& b) {
      return edit_distance(figure, a) < edit_distance(figure, b);
    });
    throw Error(Errc::unknown_figure, "unknown figure '" + std::string(figure) + "'; did you mean '" +
                                          sorted.front() + "'? available: " + join(ids, ' '));
  }
  const std::string fig(figure);
  FigureWriter w(dir, fig);
  const auto* cross = report.cross ? &*report.cross : nullptr;

  if (fig == "mountain_cdf") {
    for (const auto& a : report.assets) {
      if (!a.detail.mountain) continue;
      w.open(a.row.asset_id,
             {"asset: " + a.row.asset_id, "x: |normalized hourly return| (standard deviations)",
              "branch: tail probability, 1-F(x) on the right side and F(-x) on the left side",
              "side: right or left"},
             "x,branch,side");
      for (const auto& p : a.detail.mountain->right) w.row({num(p.x), num(p.value), "right"});
      for (const auto& p : a.detail.mountain->left) w.row({num(p.x), num(p.value), "left"});
    }
  } else if (fig == "acf_returns") {
    for (const auto& a : report.assets) {
      if (a.detail.acf_returns) emit_acf(w, a.row.asset_id, *a.detail.acf_returns, nullptr, "hourly returns");
    }
  } else if (fig == "acf_abs_returns") {
    for (const auto& a : report.assets) {
      if (a.detail.acf_abs) {
        emit_acf(w, a.row.asset_id, *a.detail.acf_abs, a.detail.vol_fit ? &*a.detail.vol_fit : nullptr,
                 "absolute hourly returns");
      }
    }
  } else if (fig == "leverage") {
    for (const auto& a : report.assets) {
      if (!a.detail.leverage) continue;
      const auto& l = *a.detail.leverage;
      w.open(a.row.asset_id,
             {"asset: " + a.row.asset_id,
              "lag: hours; k<0 is corr(R_t, |R_t+|k||), k>0 is corr(|R_t|, R_t+k)",
              "L_scaled: correlation * sqrt(count)", "band: +/-3 significance line"},
             "lag,L_scaled,count,band");
      for (std::size_t i = 0; i < l.lags.size(); ++i) {
        w.row({std::to_string(l.lags[i]), num(l.scaled_values[i]), sz(l.pair_counts[i]), "3"});
      }
    }
  } else if (fig == "tra") {
    for (const auto& a : report.assets) {
      if (!a.detail.tra) continue;
      const auto& t = *a.detail.tra;
      w.open(a.row.asset_id,
             {"asset: " + a.row.asset_id, "days: " + sz(t.n_days),
              "c_pos: corr(|R_d|, s_d+k); c_neg: corr(|R_d|, s_d-k)",
              "delta: cumulative sum of c_pos - c_neg up to N (unscaled)"},
             "N,c_pos,c_neg,delta");
      for (std::size_t i = 0; i < t.lags.size(); ++i) {
        w.row({std::to_string(t.lags[i]), num(t.c_pos[i]), num(t.c_neg[i]), num(t.delta[i])});
      }
    }
  } else if (fig == "jb_scan") {
    for (const auto& a : report.assets) {
      if (!a.detail.jb) continue;
      const auto& jb = *a.detail.jb;
      w.open(a.row.asset_id,
             {"asset: " + a.row.asset_id, "horizon_days: return horizon in days (log10 axis)",
              "jb: Jarque-Bera statistic (log10 axis)", "critical: chi-square(2) 95% quantile",
              "fit: 10^(intercept + slope * log10 horizon_days); slope " + num(jb.slope)},
             "horizon_days,n_returns,jb,p_value,critical,fit");
      for (const auto& p : jb.points) {
        w.row({num(p.horizon_days), sz(p.n_returns), num(p.statistic), num(p.p_value),
               num(JbScan::critical_value_95),
               num(std::pow(10.0, jb.intercept + jb.slope * std::log10(p.horizon_days)))});
      }
    }
  } else if (fig == "tail_fits") {
    bool opened = false;
    for (const auto& a : report.assets) {
      for (const auto* fits : {&a.detail.power_fits, &a.detail.exp_fits}) {
        for (const auto& f : *fits) {
          if (!opened) {
            w.open("", {"model power: ln P = intercept - exponent * ln x",
                        "model exponential: ln P = intercept - exponent * x",
                        "threshold: in standard deviations of the normalized returns"},
                   "asset,side,model,exponent,intercept,n_tail,r_squared,threshold");
            opened = true;
          }
          w.row({csv_quote(a.row.asset_id), f.side == TailSide::right ? "right" : "left",
                 fits == &a.detail.power_fits ? "power" : "exponential", num(f.exponent),
                 num(f.intercept), sz(f.n_tail), num(f.r_squared), num(f.threshold_sigma)});
        }
      }
    }
  } else if (cross != nullptr) {
    const auto& ids_ = cross->daily_panel.asset_ids;
    if (fig == "correlation_matrix") {
      w.open("", {"daily log-return Pearson correlation", "observations: " + sz(cross->daily_panel.n_times())},
             "asset_i,asset_j,correlation");
      for (std::size_t i = 0; i < ids_.size(); ++i) {
        for (std::size_t j = 0; j < ids_.size(); ++j) {
          w.row({csv_quote(ids_[i]), csv_quote(ids_[j]), num(cross->correlation(i, j))});
        }
      }
    } else if (fig == "eigen_spectrum") {
      const auto& e = cross->eigen;
      w.open("", {"rank: 1 is the largest eigenvalue", "explained_fraction: eigenvalue / sum",
                  "mp_edge: Marchenko-Pastur upper edge for iid returns"},
             "rank,eigenvalue,explained_fraction,mp_edge");
      for (std::size_t i = 0; i < e.eigenvalues.size(); ++i) {
        w.row({sz(i + 1), num(e.eigenvalues[i]), num(e.explained_fraction[i]), num(e.baseline_edge)});
      }
      w.open("vector", {"first eigenvector, sign fixed so the loadings sum to >= 0",
                        std::string("sign_uniform: ") + (e.first_eigvec_sign_uniform ? "true" : "false")},
             "asset,loading");
      for (std::size_t i = 0; i < ids_.size(); ++i) w.row({csv_quote(ids_[i]), num(e.first_eigenvector[i])});
    } else if (fig == "bootstrap_spectrum" && cross->bootstrap) {
      const auto& b = *cross->bootstrap;
      const auto cons = b.conservative();
      w.open("", {"trials: " + sz(b.trials), "sample_size: " + sz(b.sample_size),
                  "stderr: std / sqrt(trials)", "conservative: mean - 3 * stderr"},
             "rank,mean_fraction,stderr,conservative");
      for (std::size_t i = 0; i < b.mean_fraction.size(); ++i) {
        w.row({sz(i + 1), num(b.mean_fraction[i]), num(b.stderr_fraction[i]), num(cons[i])});
      }
    } else if (fig == "rolling_eigen" && !cross->rolling.empty()) {
      w.open("", {"window: " + sz(report.config.rolling_window) + " daily observations",
                  "first_fraction: largest eigenvalue / number of assets",
                  "cumulative_mean_log_return: running sum of the cross-asset mean daily return"},
             "time,date,first_fraction,cumulative_mean_log_return");
      for (const auto& p : cross->rolling) {
        w.row({std::to_string(p.time), format_date(p.time), num(p.first_fraction),
               num(p.cumulative_mean_log_return)});
      }
    } else if (fig == "distance_matrix" && cross->distance) {
      const auto& d = *cross->distance;
      w.open("", {"Euclidean distance between z-scored statistic vectors",
                  "rows and columns in dendrogram leaf order"},
             "asset_i,asset_j,distance");
      for (auto i : d.linkage_order) {
        for (auto j : d.linkage_order) w.row({csv_quote(d.labels[i]), csv_quote(d.labels[j]), num(d.matrix(i, j))});
      }
    } else if (fig == "cluster" && cross->clustering && cross->distance) {
      const auto& c = *cross->clustering;
      const auto& d = *cross->distance;
      w.open("merges", {"complete linkage; ids below n are leaves, n + i is merge i",
                        "leaves: " + sz(d.labels.size())},
             "step,left,right,height,size");
      for (std::size_t i = 0; i < c.merges.size(); ++i) {
        const auto& m = c.merges[i];
        w.row({sz(i), sz(m.left), sz(m.right), num(m.height), sz(m.size)});
      }
      w.open("labels", {"label: flat cluster after cutting the tree", "order: dendrogram position"},
             "asset,label,order");
      for (std::size_t pos = 0; pos < c.leaf_order.size(); ++pos) {
        const auto leaf = c.leaf_order[pos];
        w.row({csv_quote(d.labels[leaf]), std::to_string(c.labels[leaf]), sz(pos)});
      }
    }
  }

  auto written = w.finish();
  if (written.empty()) {
    throw Error(Errc::insufficient_data, "report has no data for figure '" + fig + "'");
  }
  return written;
}

// ---------------------------------------------------------------------------
// Bundle

std::filesystem::path write_report(const Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  auto write_text = [&](const std::filesystem::path& name, const std::string& text) {
    std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + (dir / name).string());
    out << text;
    files.push_back(dir / name);
  };

  std::vector<StylizedFactsRow> rows;
  for (const auto& a : report.assets) rows.push_back(a.row);
  write_text("facts.csv", facts_table_csv(rows));

  std::string failures = "asset_id,reason,message\n";
  for (const auto& f : report.failures) {
    failures += csv_quote(f.asset_id) + "," + f.reason + "," + csv_quote(f.message) + "\n";
  }
  write_text("failures.csv", failures);

  if (report.cross && !report.cross->notes.empty()) {
    std::string notes;
    for (const auto& n : report.cross->notes) notes += n + "\n";
    write_text("notes.txt", notes);
  }

  const auto fig_dir = dir / "figures";
  std::filesystem::remove_all(fig_dir);
  std::vector<std::string> skipped;
  for (const auto& id : figure_ids()) {
    try {
      auto written = emit_plot_data(report, id, fig_dir);
      files.insert(files.end(), written.begin(), written.end());
    } catch (const Error& e) {
      if (e.code() != Errc::insufficient_data) throw;
      skipped.push_back(id);
    }
  }

  std::vector<std::pair<std::string, std::string>> sums;
  for (const auto& f : files) {
    sums.emplace_back(std::filesystem::relative(f, dir).generic_string(), sha256_file(f));
  }
  std::sort(sums.begin(), sums.end());

  std::string manifest;
  manifest += "format=stylized-report/1\n";
  manifest += "config_hash=" + config_hash(report.config) + "\n";
  manifest += "seed=" + std::to_string(report.config.seed) + "\n";
  manifest += "assets=" + std::to_string(report.assets.size()) + "\n";
  manifest += "failures=" + std::to_string(report.failures.size()) + "\n";
  manifest += std::string("partial=") + (report.partial() ? "1" : "0") + "\n";
  manifest += "skipped_figures=" + join(skipped, ' ') + "\n";
  for (const auto& [name, sum] : sums) manifest += "file." + name + "=" + sum + "\n";

  const auto manifest_path = dir / "manifest.txt";
  {
    std::ofstream out(manifest_path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + manifest_path.string());
    out << manifest;
  }
  if (!verify_manifest(manifest_path)) throw Error(Errc::io_error, "manifest self-check failed");
  return manifest_path;
}

bool verify_manifest(const std::filesystem::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) return false;
  const auto dir = manifest_path.parent_path();
  std::string line;
  bool any = false;
  while (std::getline(in, line)) {
    if (line.rfind("file.", 0) != 0) continue;
    const auto eq = line.rfind('=');
    if (eq == std::string::npos) return false;
    const auto path = dir / line.substr(5, eq - 5);
    if (!std::filesystem::exists(path) || sha256_file(path) != line.substr(eq + 1)) return false;
    any = true;
  }
  return any;
}

}  // namespace stylized
