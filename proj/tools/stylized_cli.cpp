// stylized: command-line front end. Exit codes: 0 success, 2 partial, 1 fatal.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "stylized/stylized.hpp"

namespace fs = std::filesystem;
using namespace stylized;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_fatal = 1;
constexpr int exit_partial = 2;

struct Common {
  std::string config;
  std::string from;
  std::string to;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool offline = false;
};

void add_common(CLI::App* cmd, Common& c, bool needs_config) {
  auto* opt = cmd->add_option("--config", c.config, "run configuration (JSON)");
  if (needs_config) opt->required()->check(CLI::ExistingFile);
  cmd->add_option("--from", c.from, "window start, YYYY-MM-DD or epoch seconds");
  cmd->add_option("--to", c.to, "window end (exclusive)");
  cmd->add_option("--seed", c.seed, "seed for resampling stages");
  cmd->add_option("--out", c.out, "output directory or file");
  cmd->add_flag("--offline", c.offline, "never touch the network");
}

bool env_allows_network() {
  const char* v = std::getenv("ALLOW_NETWORK");
  if (v == nullptr) return false;
  const std::string s(v);
  return s == "1" || s == "true" || s == "yes";
}

RunConfig resolve_config(const Common& c) {
  RunConfig cfg = load_config(c.config);
  if (!c.from.empty()) cfg.from = parse_date(c.from);
  if (!c.to.empty()) cfg.to = parse_date(c.to);
  if (c.seed) cfg.seed = *c.seed;
  if (!c.out.empty()) cfg.output_dir = c.out;
  cfg.allow_network = !c.offline && (cfg.allow_network || env_allows_network());
  if (cfg.from && cfg.to && *cfg.from >= *cfg.to) {
    throw Error(Errc::config_error, "--from must precede --to");
  }
  return cfg;
}

FetchOptions fetch_options(const RunConfig& cfg) {
  FetchOptions o;
  o.allow_network = cfg.allow_network;
  if (cfg.cache_dir) o.cache_dir = *cfg.cache_dir / "candles";
  return o;
}

SourceSpec windowed(SourceSpec spec, const RunConfig& cfg) {
  if (cfg.from) spec.start = *cfg.from;
  if (cfg.to) spec.end = *cfg.to;
  return spec;
}

void print_failures(const Report& r) {
  for (const auto& f : r.failures) std::cerr << "failed: " << f.asset_id << ": " << f.reason << ": " << f.message << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_error, "cannot write " + path);
  out << text;
}

// ingest ---------------------------------------------------------------------
int run_ingest(const Common& c) {
  const auto cfg = resolve_config(c);
  const fs::path dir = c.out.empty() ? fs::path("candles") : fs::path(c.out);
  fs::create_directories(dir);
  int status = exit_ok;
  for (const auto& src : cfg.sources) {
    try {
      const auto got = load_candles(windowed(src.source, cfg), fetch_options(cfg));
      write_candles_file(dir / (src.id + ".csv"), got.records);
      std::cout << src.id << ": " << got.records.size() << " candles";
      if (got.from_cache) std::cout << " (cache)";
      if (got.requests > 0) std::cout << ", " << got.requests << " requests";
      if (got.rejected > 0) std::cout << ", " << got.rejected << " rejected";
      if (got.partial) {
        std::cout << ", partial";
        status = exit_partial;
      }
      std::cout << "\n";
    } catch (const Error& e) {
      std::cerr << "failed: " << src.id << ": " << to_string(e.code()) << ": " << e.what() << "\n";
      status = exit_partial;
    }
  }
  return status;
}

// row ------------------------------------------------------------------------
int run_row(const Common& c, const std::string& asset) {
  auto cfg = resolve_config(c);
  if (!asset.empty()) {
    std::erase_if(cfg.sources, [&](const AssetSource& s) { return s.id != asset; });
    if (cfg.sources.empty()) throw Error(Errc::config_error, "no source with id '" + asset + "'");
  }
  std::vector<StylizedFactsRow> rows;
  int status = exit_ok;
  for (const auto& src : cfg.sources) {
    try {
      const auto got = load_candles(windowed(src.source, cfg), fetch_options(cfg));
      const auto prices = to_price_series(got.records, src.id, PriceField::close, src.source.interval_seconds).series;
      auto row = compute_asset(prices, src, cfg).row;
      if (!row.complete() || got.partial) status = exit_partial;
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      std::cerr << "failed: " << src.id << ": " << to_string(e.code()) << ": " << e.what() << "\n";
      status = exit_partial;
    }
  }
  if (rows.empty()) throw Error(Errc::insufficient_data, "no asset produced a row");
  write_text(c.out, facts_table_csv(rows));
  return status;
}

// report ---------------------------------------------------------------------
int finish_report(const Report& r, const fs::path& dir) {
  const auto manifest = write_report(r, dir);
  print_failures(r);
  std::cout << "report: " << r.assets.size() << " assets, " << r.failures.size() << " failures -> "
            << manifest.string() << "\n";
  return r.partial() ? exit_partial : exit_ok;
}

int run_report_cmd(const Common& c, const std::string& split) {
  const auto cfg = resolve_config(c);
  if (split.empty()) return finish_report(run_report(cfg), cfg.output_dir);
  const auto [before, after] = run_split_report(cfg, parse_date(split));
  const int a = finish_report(before, cfg.output_dir / "before");
  const int b = finish_report(after, cfg.output_dir / "after");
  return std::max(a, b);
}

// plotdata -------------------------------------------------------------------
int run_plotdata(const Common& c, const std::vector<std::string>& figures, bool list) {
  if (list) {
    for (const auto& id : figure_ids()) std::cout << id << "\n";
    return exit_ok;
  }
  if (c.config.empty()) throw Error(Errc::config_error, "--config is required");
  if (figures.empty()) throw Error(Errc::config_error, "--figure is required (see --list)");
  const auto cfg = resolve_config(c);
  // Reject bad ids before the expensive run.
  for (const auto& f : figures) {
    try {
      (void)emit_plot_data(Report{}, f, fs::temp_directory_path());
    } catch (const Error& e) {
      if (e.code() == Errc::unknown_figure) throw;
    }
  }
  const auto r = run_report(cfg);
  const fs::path dir = c.out.empty() ? fs::path("figures") : fs::path(c.out);
  fs::create_directories(dir);
  for (const auto& f : figures) {
    for (const auto& p : emit_plot_data(r, f, dir)) std::cout << p.string() << "\n";
  }
  print_failures(r);
  return r.partial() ? exit_partial : exit_ok;
}

// cluster --------------------------------------------------------------------
int run_cluster(const std::string& facts, std::size_t n_clusters, bool include_zeros, const std::string& out) {
  std::ifstream in(facts, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read " + facts);
  std::stringstream buf;
  buf << in.rdbuf();
  const auto rows = parse_facts_table(buf.str());
  auto dist = stylized_distance_matrix(facts_features(rows, include_zeros));
  const auto cl = hierarchical_cluster(dist, std::min(n_clusters, dist.labels.size()));
  std::ostringstream s;
  s << "# complete-linkage clustering on z-scored facts\n";
  for (const auto& d : dist.dropped_columns) s << "# dropped column " << d << "\n";
  for (const auto& d : dist.dropped_rows) s << "# dropped row " << d << "\n";
  s << "order,asset_id,cluster\n";
  for (std::size_t i = 0; i < cl.leaf_order.size(); ++i) {
    const auto leaf = cl.leaf_order[i];
    s << i << "," << dist.labels[leaf] << "," << cl.labels[leaf] << "\n";
  }
  write_text(out, s.str());
  return dist.dropped_rows.empty() ? exit_ok : exit_partial;
}

// dexarb ---------------------------------------------------------------------
PriceSeries read_prices(const std::string& path, const std::string& id) {
  const auto parsed = parse_candles_file(path);
  return to_price_series(parsed.records, id).series;
}

int run_dexarb(const std::string& pool_path, const std::string& ref_path, double fee, int max_lag,
               const std::string& out) {
  const FeeTier tier(fee);
  const auto pool = read_prices(pool_path, "pool");
  const auto ref = read_prices(ref_path, "ref");
  const fs::path dir = out.empty() ? fs::path("dexarb") : fs::path(out);
  fs::create_directories(dir);

  const auto band = no_arb_band(ref, tier);
  {
    std::ofstream f(dir / "band.csv", std::ios::binary);
    f << "# no-arbitrage band gamma*S .. S/gamma, fee " << format_double(fee) << "\n";
    f << "timestamp,lower,upper\n";
    for (std::size_t i = 0; i < band.timestamps.size(); ++i) {
      f << band.timestamps[i] << "," << format_double(band.lower[i]) << "," << format_double(band.upper[i]) << "\n";
    }
  }
  const auto violations = band_violations(pool, ref, tier);
  {
    std::ofstream f(dir / "violations.csv", std::ios::binary);
    f << "timestamp,side,excess\n";
    for (const auto& v : violations) {
      f << v.time << "," << (v.side == BandSide::above ? "above" : "below") << "," << format_double(v.excess) << "\n";
    }
  }
  const auto xc = lead_lag_xcorr(log_returns(ref, ref.interval_seconds()), log_returns(pool, ref.interval_seconds()),
                                 max_lag);
  {
    std::ofstream f(dir / "leadlag.csv", std::ios::binary);
    f << "# E[ref(t) pool(t+k)] / (sigma sigma); positive k: ref leads pool; stderr 1/sqrt(N)\n";
    f << "k,xcorr,pairs,stderr\n";
    for (std::size_t i = 0; i < xc.lags.size(); ++i) {
      f << xc.lags[i] << "," << format_double(xc.values[i]) << "," << xc.pair_counts[i] << ","
        << format_double(xc.stderr_values[i]) << "\n";
    }
  }
  std::cout << "band points: " << band.timestamps.size() << ", violations: " << violations.size()
            << ", pool price changes: " << count_price_changes(pool) << "\n";
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stylized-fact statistics for crypto and traditional assets"};
  app.require_subcommand(1);

  Common common;
  std::string asset, split, facts, pool, ref;
  std::vector<std::string> figures;
  bool list = false, include_zeros = false;
  std::size_t n_clusters = 8;
  double fee = 0.003;
  int max_lag = 10;

  auto* ingest = app.add_subcommand("ingest", "fetch or read candles and write canonical files");
  add_common(ingest, common, true);
  auto* row = app.add_subcommand("row", "compute statistic rows as a delimited table");
  add_common(row, common, true);
  row->add_option("--asset", asset, "only this source id");
  auto* report = app.add_subcommand("report", "full report bundle with manifest");
  add_common(report, common, true);
  report->add_option("--split", split, "cutoff date: write before/ and after/ sub-reports");
  auto* plot = app.add_subcommand("plotdata", "data files behind one or more figures");
  add_common(plot, common, false);
  plot->add_option("--figure", figures, "figure id (repeatable)");
  plot->add_flag("--list", list, "print the available figure ids");
  auto* cluster = app.add_subcommand("cluster", "cluster assets by their statistic rows");
  cluster->add_option("--facts", facts, "facts table written by `report` or `row`")->required()->check(CLI::ExistingFile);
  cluster->add_option("--clusters", n_clusters, "number of flat clusters")->check(CLI::PositiveNumber);
  cluster->add_flag("--include-zeros", include_zeros, "use zeros_pct as a feature");
  cluster->add_option("--out", common.out, "output file (default stdout)");
  auto* dex = app.add_subcommand("dexarb", "no-arbitrage band, violations and lead-lag for a pool");
  dex->add_option("--pool", pool, "pool candle file")->required()->check(CLI::ExistingFile);
  dex->add_option("--ref", ref, "reference candle file")->required()->check(CLI::ExistingFile);
  dex->add_option("--fee", fee, "fee fraction, e.g. 0.003 for 30bp");
  dex->add_option("--max-lag", max_lag, "largest lead-lag in steps")->check(CLI::PositiveNumber);
  dex->add_option("--out", common.out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? exit_ok : exit_fatal;
  }

  try {
    if (*ingest) return run_ingest(common);
    if (*row) return run_row(common, asset);
    if (*report) return run_report_cmd(common, split);
    if (*plot) return run_plotdata(common, figures, list);
    if (*cluster) return run_cluster(facts, n_clusters, include_zeros, common.out);
    if (*dex) return run_dexarb(pool, ref, fee, max_lag, common.out);
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_fatal;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_fatal;
  }
  return exit_fatal;
}
