#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include "check.hpp"
#include "stylized/ingestion.hpp"

using namespace stylized;

namespace {

ParseReport parse(const std::string& text, const CandleSchema& schema = CandleSchema::canonical()) {
  std::istringstream in(text);
  return parse_candles(in, schema);
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  return dir;
}

/// Local candle endpoint: GET /k?start=..&end=..&limit=.. answers with one
/// row per hour in [start, end], in Binance-like order with string prices.
class StubServer {
 public:
  std::atomic<int> hits{0};
  std::atomic<int> fail_first{0};   // answer 503 to this many requests
  std::atomic<bool> always_fail{false};
  std::atomic<int> overlap{0};      // extra candles before start
  std::atomic<long long> empty_page_start{-1};

  StubServer() {
    server_.Get("/k", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = ++hits;
      if (always_fail || n <= fail_first) {
        res.status = always_fail ? 500 : 503;
        return;
      }
      const long long start = std::stoll(req.get_param_value("start"));
      const long long end = std::stoll(req.get_param_value("end"));
      std::string body = "[";
      if (start != empty_page_start) {
        for (long long t = start - overlap * 3600LL; t <= end; t += 3600) {
          if (body.size() > 1) body += ",";
          const double p = 100.0 + static_cast<double>(t % 7200) / 3600.0;
          body += "[" + std::to_string(t * 1000) + ",\"" + std::to_string(p) + "\",\"" +
                  std::to_string(p + 1) + "\",\"" + std::to_string(p - 1) + "\",\"" + std::to_string(p) +
                  "\",\"5\"]";
        }
      }
      res.set_content(body + "]", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  SourceSpec spec(std::int64_t n_candles) const {
    SourceSpec s;
    s.kind = SourceSpec::Kind::http;
    s.location = "http://127.0.0.1:" + std::to_string(port_) + "/k?start={start}&end={end}&limit={limit}";
    s.venue = "stub";
    s.symbol = "ETHUSDT";
    s.interval_seconds = 3600;
    s.start = 1600000000 - 1600000000 % 3600;
    s.end = s.start + n_candles * 3600;
    s.rate_limit = 1000.0;
    s.page_size = 1000;
    s.columns.unit = TimeUnit::milliseconds;
    return s;
  }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

FetchOptions fast_options() {
  FetchOptions o;
  o.allow_network = true;
  o.backoff_base = std::chrono::milliseconds(1);
  o.timeout = std::chrono::seconds(5);
  return o;
}

}  // namespace

TEST_CASE("candle validity") {
  CHECK(CandleRecord{0, 10, 12, 9, 11, 0}.valid());
  CHECK_FALSE(CandleRecord{0, 10, 9, 12, 11, 1}.valid());
  CHECK_FALSE(CandleRecord{0, 10, 12, 9, 13, 1}.valid());
  CHECK_FALSE(CandleRecord{0, 10, 12, 9, 11, -1}.valid());
  CHECK_FALSE(CandleRecord{0, 0, 12, 0, 11, 1}.valid());
}

TEST_CASE("parse sorts, dedupes and rejects") {
  const auto r = parse(
      "timestamp,open,high,low,close,volume\n"
      "7200,3,4,2,3,1\n"
      "0,1,2,0.5,1.5,1\n"
      "3600,2,3,1,2,1\n"
      "3600,2,3,1,2.5,9\n"
      "10800,5,4,6,5,1\n");
  REQUIRE(r.records.size() == 3);
  CHECK(r.records[0].timestamp_open == 0);
  CHECK(r.records[1].timestamp_open == 3600);
  CHECK(r.records[1].close == 2.5);
  CHECK(r.duplicates == 1);
  CHECK(r.rejected == 1);
  CHECK(r.warnings.size() == 2);
}

TEST_CASE("empty input warns") {
  const auto r = parse("");
  CHECK(r.records.empty());
  REQUIRE(r.warnings.size() == 1);
}

TEST_CASE("malformed rows carry their line number") {
  const auto caught = testkit::catch_error([] { (void)parse("0,1,2,0.5,1.5,1\n\n3600,abc,3,1,2,1\n"); });
  CHECK(caught.code == Errc::parse_error);
  CHECK(caught.message.find("line 3") != std::string::npos);
  CHECK(testkit::catch_error([] { (void)parse("0,1,2\n"); }).code == Errc::parse_error);
}

TEST_CASE("custom layouts") {
  CandleSchema s;
  s.delimiter = ';';
  s.timestamp = 0;
  s.low = 1;
  s.high = 2;
  s.open = 3;
  s.close = 4;
  s.volume = 5;
  s.unit = TimeUnit::milliseconds;
  s.header = false;
  const auto r = parse("3600000;1;3;2;2.5;7\n", s);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0] == CandleRecord{3600, 2, 3, 1, 2.5, 7});
}

TEST_CASE("serialize then parse is bit identical") {
  std::vector<CandleRecord> recs;
  double p = 1.0 / 3.0;
  for (int i = 0; i < 200; ++i) {
    p *= 1.0 + 1e-3 * std::sin(i * 0.7);
    recs.push_back({i * 60LL, p, p * 1.01, p * 0.99, p * (1.0 + 1e-4), 0.1 * i});
  }
  const auto text = serialize_candles(recs);
  const auto back = parse(text);
  CHECK(back.records == recs);
  CHECK(serialize_candles(back.records) == text);
}

TEST_CASE("JSON rows accept numbers and strings") {
  CandleSchema s;
  s.unit = TimeUnit::milliseconds;
  std::size_t rejected = 0;
  const auto rows = parse_json_candles(R"([[3600000,"1","2","0.5","1.5","10"],[7200000,1,2,3,1.5,1]])", s, &rejected);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].timestamp_open == 3600);
  CHECK(rejected == 1);
  CHECK_ERRC(parse_json_candles("{\"code\":-1}", s), Errc::parse_error);
  CHECK_ERRC(parse_json_candles("[[1,2]]", s), Errc::parse_error);
}

TEST_CASE("price series conversion") {
  const std::vector<CandleRecord> one = {{3600, 1, 2, 0.5, 1.5, 1}};
  CHECK(to_price_series(one, "X").series.size() == 1);

  std::vector<CandleRecord> recs;
  for (int h = 0; h < 10; ++h) {
    if (h == 4) continue;
    recs.push_back({h * 3600LL, 1.0 + h, 2.0 + h, 0.5 + h, 1.5 + h, 1});
  }
  const auto conv = to_price_series(recs, "X");
  CHECK(conv.series.size() == 9);
  CHECK(conv.interval_seconds == 3600);
  REQUIRE(conv.gaps.size() == 1);
  CHECK(conv.gaps[0].after == 3 * 3600);
  CHECK(conv.gaps[0].missing == 1);
  const auto prices = conv.series.prices();
  CHECK(std::is_sorted(prices.begin(), prices.end()));
  CHECK(to_price_series(recs, "X", PriceField::open).series.prices().front() == 1.0);

  recs.push_back({10 * 3600LL + 1800, 1, 2, 0.5, 1.5, 1});
  CHECK_ERRC(to_price_series(recs, "X", PriceField::close, 3600), Errc::parse_error);
}

TEST_CASE("source validation and URL templates") {
  SourceSpec s;
  s.kind = SourceSpec::Kind::http;
  s.location = "https://x/{symbol}?i={interval}&s={start_ms}&e={end}&l={limit}";
  s.symbol = "BTC";
  s.interval_label = "1h";
  s.start = 0;
  s.end = 7200;
  CHECK_ERRC(s.validate(), Errc::config_error);
  s.rate_limit = 2.0;
  CHECK_NOTHROW(s.validate());
  CHECK(expand_url_template(s, 10, 3610, 2) == "https://x/BTC?i=1h&s=10000&e=3610&l=2");
}

TEST_CASE("rate limiter spaces requests") {
  RateLimiter limiter(50.0);
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 6; ++i) limiter.acquire();
  const auto elapsed = std::chrono::steady_clock::now() - t0;
  CHECK(elapsed >= std::chrono::milliseconds(90));
  CHECK(&RateLimiter::for_host("a.example", 1.0) == &RateLimiter::for_host("a.example", 5.0));
}

TEST_CASE("paged fetch, cache and dedupe against a stub server") {
  StubServer server;
  const auto spec = server.spec(5000);
  auto opts = fast_options();
  opts.cache_dir = fresh_dir("stylized_fetch_cache");

  const auto first = fetch_candles(spec, opts);
  CHECK(server.hits == 5);
  CHECK(first.requests == 5);
  CHECK(first.records.size() == 5000);
  CHECK_FALSE(first.partial);
  CHECK(first.records.front().timestamp_open == spec.start);
  CHECK(first.records.back().timestamp_open == spec.end - 3600);

  const auto second = fetch_candles(spec, opts);
  CHECK(server.hits == 5);
  CHECK(second.requests == 0);
  CHECK(second.from_cache);
  CHECK(second.records == first.records);

  auto other = spec;
  other.end -= 3600;
  CHECK(CandleCache(*opts.cache_dir).entry_path(other) != CandleCache(*opts.cache_dir).entry_path(spec));

  opts.allow_network = false;
  CHECK(fetch_candles(spec, opts).from_cache);
  CHECK_ERRC(fetch_candles(other, opts), Errc::network_disabled);
  std::filesystem::remove_all(*opts.cache_dir);
}

TEST_CASE("overlapping pages are de-duplicated") {
  StubServer server;
  server.overlap = 3;
  const auto r = fetch_candles(server.spec(2500), fast_options());
  CHECK(r.requests == 3);
  CHECK(r.records.size() == 2500);
}

TEST_CASE("transient failures are retried") {
  StubServer server;
  server.fail_first = 2;
  const auto r = fetch_candles(server.spec(1500), fast_options());
  CHECK(r.requests == 4);
  CHECK(r.records.size() == 1500);
}

TEST_CASE("exhausted retries report the last status") {
  StubServer server;
  server.always_fail = true;
  const auto caught = testkit::catch_error([&] { (void)fetch_candles(server.spec(100), fast_options()); });
  CHECK(caught.code == Errc::fetch_failed);
  CHECK(caught.message.find("500") != std::string::npos);
  CHECK(server.hits == 6);
}

TEST_CASE("an empty page marks the result partial and skips the cache") {
  StubServer server;
  const auto spec = server.spec(3000);
  server.empty_page_start = spec.start + 1000 * 3600;
  auto opts = fast_options();
  opts.cache_dir = fresh_dir("stylized_partial_cache");
  const auto r = fetch_candles(spec, opts);
  CHECK(r.partial);
  CHECK(r.records.size() == 2000);
  CHECK_FALSE(std::filesystem::exists(CandleCache(*opts.cache_dir).entry_path(spec)));
  std::filesystem::remove_all(*opts.cache_dir);
}

TEST_CASE("file sources are clipped to the range") {
  const auto dir = fresh_dir("stylized_file_source");
  std::vector<CandleRecord> recs;
  for (int h = 0; h < 48; ++h) recs.push_back({h * 3600LL, 1, 2, 0.5, 1.5, 1});
  write_candles_file(dir / "x.csv", recs);
  SourceSpec s;
  s.location = (dir / "x.csv").string();
  s.symbol = "X";
  s.start = 3600;
  s.end = 10 * 3600;
  const auto r = load_candles(s, {});
  CHECK(r.records.size() == 9);
  std::filesystem::remove_all(dir);
}
